from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class EnsembleParams:
    """Matrix size ``N`` (quaternion units), Wishart parameter ``n`` and inducing ``L = M - N``."""

    N: int
    n: int
    L: int

    def __post_init__(self):
        for name in ("N", "n", "L"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ValueError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not (self.n >= self.N > 0 and self.L >= 0):
            raise ValueError(f"need n >= N > 0 and L >= 0, got N={self.N}, n={self.n}, L={self.L}")

    @property
    def M(self) -> int:
        return self.N + self.L

    @property
    def scale(self) -> int:
        """``n + L``, the density normalization used by the large-N laws."""
        return self.n + self.L

    def as_dict(self) -> dict:
        return {"N": self.N, "n": self.n, "L": self.L}
