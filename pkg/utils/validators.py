import re
from typing import Iterable, List

from models.data_models import SamplerPolicy


_TOPK_RE = re.compile(r"^topk:(\d+)$")
_NUCLEUS_RE = re.compile(r"^nucleus:(\d*\.?\d+(?:[eE][-+]?\d+)?)$")

DEFAULT_POLICIES = "argmax,random,topk:3,nucleus:0.9,daemon"


class PolicySyntaxError(ValueError):
    pass


def parse_policy(text: str) -> SamplerPolicy:
    """Parse `argmax`, `random`, `topk:<k>`, `nucleus:<p>`, `daemon` or `daemon-argmax`."""
    s = (text or "").strip().lower()
    if s in ("argmax", "random"):
        return SamplerPolicy(kind=s)
    if s == "daemon":
        return SamplerPolicy(kind="daemon", mode="sample")
    if s == "daemon-argmax":
        return SamplerPolicy(kind="daemon", mode="argmax")
    m = _TOPK_RE.match(s)
    if m:
        k = int(m.group(1))
        if k < 1:
            raise PolicySyntaxError(f"top-k needs k >= 1, got {text!r}")
        return SamplerPolicy(kind="topk", k=k)
    m = _NUCLEUS_RE.match(s)
    if m:
        p = float(m.group(1))
        if not 0.0 < p <= 1.0:
            raise PolicySyntaxError(f"nucleus needs 0 < p <= 1, got {text!r}")
        return SamplerPolicy(kind="nucleus", p=p)
    raise PolicySyntaxError(f"unknown policy {text!r} (expected argmax, random, topk:<k>, nucleus:<p>, daemon, daemon-argmax)")


def parse_policies(text: str) -> List[SamplerPolicy]:
    policies = [parse_policy(part) for part in (text or "").split(",") if part.strip()]
    if not policies:
        raise PolicySyntaxError("at least one policy is required")
    names = [p.name for p in policies]
    if len(set(names)) != len(names):
        raise PolicySyntaxError(f"duplicate policies in {text!r}")
    return policies


def is_open_fraction(value: float) -> bool:
    return 0.0 < value < 1.0


def parse_number_list(text: str, cast=float) -> List:
    try:
        values = [cast(part) for part in (text or "").split(",") if part.strip()]
    except ValueError as e:
        raise ValueError(f"invalid number list {text!r}") from e
    if not values:
        raise ValueError("number list must be non-empty")
    return values


def missing_columns(available: Iterable[str], required: Iterable[str]) -> List[str]:
    have = set(available)
    return [c for c in required if c not in have]
