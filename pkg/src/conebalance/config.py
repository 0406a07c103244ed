from dataclasses import dataclass, asdict, replace

DEFAULT_GRID = 512


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by all pipeline stages.

    ``classification`` and ``beta_flat`` are the bands used to decide the
    monodromy case; ``ode_rtol`` drives every adaptive integration.
    """

    classification: float = 1e-7
    beta_flat: float = 1e-7
    ode_rtol: float = 1e-11
    ode_atol: float = 1e-13
    degeneracy: float = 1e-10
    condition: float = 1e10
    gauge: float = 1e-6
    orthogonality: float = 1e-8
    closure: float = 1e-7
    pairing: float = 1e-9
    inequality: float = 1e-6
    region: float = 1e-9
    quadric: float = 1e-6
    verification: float = 1e-5

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value > 0:
                raise ValueError(f"tolerance {name} must be positive, got {value}")

    def with_overrides(self, **kwargs) -> "Tolerances":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()
