from dataclasses import asdict, dataclass, replace

import numpy as np

from ._validation import ValidationError, check_positive_float, check_positive_int


@dataclass(frozen=True)
class SystemConfig:
    """Dimensions and link budget of an RIS-assisted downlink.

    Powers are linear (watts); the RIS is an ``n_r_y`` x ``n_r_z`` planar grid.
    Defaults are the desk-scale reference link: 16-antenna BS, 8x8 RIS,
    16-antenna user, 6 BS-RIS paths and 8 RIS-user paths.
    """

    n_b: int = 16
    n_r_y: int = 8
    n_r_z: int = 8
    n_u: int = 16
    p_paths: int = 6
    l_paths: int = 8
    power_budget: float = 1.0
    noise_var: float = 1.0
    spacing_ratio: float = 0.5

    def __post_init__(self):
        for name in ("n_b", "n_r_y", "n_r_z", "n_u", "p_paths", "l_paths"):
            object.__setattr__(self, name, check_positive_int(getattr(self, name), name))
        for name in ("power_budget", "noise_var", "spacing_ratio"):
            object.__setattr__(self, name, check_positive_float(getattr(self, name), name))

    @property
    def n_r(self):
        return self.n_r_y * self.n_r_z

    @property
    def snr_db(self):
        return 10.0 * np.log10(self.power_budget / self.noise_var)

    @property
    def gain_scale(self):
        """N_b N_u N_r^2 / (sigma^2 P L), the common SNR factor of every stream."""
        return self.n_b * self.n_u * self.n_r**2 / (self.noise_var * self.p_paths * self.l_paths)

    def with_snr_db(self, snr_db):
        """Copy with ``noise_var`` kept and ``power_budget`` set from ``snr_db``."""
        return replace(self, power_budget=self.noise_var * 10.0 ** (snr_db / 10.0))

    def replace(self, **changes):
        unknown = set(changes) - set(asdict(self))
        if unknown:
            raise ValidationError(f"unknown config field(s): {sorted(unknown)}", key=sorted(unknown)[0])
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)
