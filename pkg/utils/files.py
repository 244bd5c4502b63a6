from contextlib import contextmanager
import os
from pathlib import Path
import tempfile
from typing import Iterator, Union


@contextmanager
def atomic_writer(path: Union[str, Path], encoding: str = "utf-8") -> Iterator:
    """Open a temp file next to `path`; rename it into place only if the block succeeds."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}-", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding=encoding, newline="") as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
