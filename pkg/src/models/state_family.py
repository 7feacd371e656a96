"""
Model for a parameterized family of states.
"""
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Optional

from utils.error_handler import UsageError

FAMILY_PARAMS = ('alpha', 'beta', 'p', 'd', 'n')


@dataclass(frozen=True)
class StateFamily:
    """A family id plus the parameters that pick one member.

    ``p`` follows the convention of the family it belongs to: GHZ visibility
    for ``ghz``/``ghz_noise``, white-noise weight for ``w``.
    """

    family: str
    alpha: float = 0.0
    beta: float = 0.0
    p: Optional[float] = None
    d: int = 2
    n: int = 3
    path: Optional[str] = None

    def with_param(self, name: str, value: float) -> 'StateFamily':
        """Copy with one numeric parameter changed."""
        if name not in FAMILY_PARAMS:
            raise UsageError(f"unknown family parameter '{name}', expected one of {FAMILY_PARAMS}")
        if name in ('d', 'n'):
            value = int(value)
        return replace(self, **{name: value})

    def to_dict(self) -> Dict[str, Any]:
        return {key: value for key, value in asdict(self).items() if value is not None}

    def __repr__(self):
        return (f"<StateFamily({self.family}, alpha={self.alpha}, beta={self.beta}, "
                f"p={self.p}, d={self.d}, n={self.n})>")
