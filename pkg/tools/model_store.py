import json
from pathlib import Path
from typing import Any, Dict, Union

from models.data_models import Vocabulary
from models.ngram import NgramModel
from utils.files import atomic_writer


FORMAT_NAME = "ngram-suffix-model"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


def model_to_dict(model: NgramModel) -> Dict[str, Any]:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "vocabulary": list(model.vocabulary.labels),
        "order": model.order,
        "alpha": model.alpha,
        "max_trace_length": model.max_trace_length,
        "transitions": [
            [list(ctx), [[a, c] for a, c in sorted(counts.items())]]
            for ctx, counts in sorted(model.transitions.items())
        ],
        "durations": [
            [list(ctx), a, s, n] for (ctx, a), (s, n) in sorted(model.durations.items())
        ],
        "activity_durations": [[a, s, n] for a, (s, n) in sorted(model.activity_durations.items())],
        "global_duration": list(model.global_duration),
    }


def model_from_dict(data: Dict[str, Any]) -> NgramModel:
    if not isinstance(data, dict) or data.get("format") != FORMAT_NAME:
        raise ModelFormatError("not an n-gram suffix model file")
    if data.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model version {data.get('version')!r}")
    try:
        return NgramModel(
            vocabulary=Vocabulary(tuple(data["vocabulary"])),
            order=int(data["order"]),
            alpha=float(data["alpha"]),
            transitions={tuple(ctx): {int(a): int(c) for a, c in counts} for ctx, counts in data["transitions"]},
            durations={(tuple(ctx), int(a)): (float(s), int(n)) for ctx, a, s, n in data["durations"]},
            activity_durations={int(a): (float(s), int(n)) for a, s, n in data["activity_durations"]},
            global_duration=(float(data["global_duration"][0]), int(data["global_duration"][1])),
            max_trace_length=int(data.get("max_trace_length", 0)),
        )
    except (KeyError, TypeError, IndexError) as e:
        raise ModelFormatError(f"malformed model file: {e}") from e


def save_model(model: NgramModel, path: Union[str, Path]) -> Path:
    with atomic_writer(path) as f:
        json.dump(model_to_dict(model), f)
    return Path(path)


def load_model(path: Union[str, Path]) -> NgramModel:
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ModelFormatError(f"model file is not valid JSON: {e}") from e
    return model_from_dict(data)
