"""Saleh-Valenzuela channel model for the BS -> RIS -> user link.

The BS and user carry uniform linear arrays, the RIS a uniform planar array.
UPA elements are enumerated row-major over (y, z): element ``iy * m_z + iz``
sits at grid position (iy, iz).
"""

from dataclasses import dataclass

import numpy as np

from ._validation import DimensionError, ValidationError

#: Uniform sampling ranges (low, high) for every angle family.
DEFAULT_ANGLE_RANGES = {
    "bs_aod": (-np.pi, np.pi),
    "ris_azimuth": (-np.pi / 2, np.pi / 2),
    "ris_elevation": (0.0, np.pi),
    "user_aoa": (-np.pi, np.pi),
}


def ula_response(phi, n, spacing_ratio=0.5):
    """Unit-norm ULA steering vector for angle ``phi`` (radians)."""
    k = np.arange(n)
    return np.exp(2j * np.pi * spacing_ratio * k * np.sin(phi)) / np.sqrt(n)


def upa_response(phi1, phi2, m_y, m_z, spacing_ratio=0.5):
    """Unit-norm UPA steering vector for azimuth ``phi1`` and elevation ``phi2``."""
    iy = np.arange(m_y)[:, None]
    iz = np.arange(m_z)[None, :]
    phase = iy * np.sin(phi1) * np.sin(phi2) + iz * np.cos(phi2)
    return (np.exp(2j * np.pi * spacing_ratio * phase) / np.sqrt(m_y * m_z)).ravel()


def ula_matrix(phis, n, spacing_ratio=0.5):
    """Stack ULA responses for each angle in ``phis`` as columns (n x len(phis))."""
    phis = np.asarray(phis, dtype=float)
    k = np.arange(n)[:, None]
    return np.exp(2j * np.pi * spacing_ratio * k * np.sin(phis)[None, :]) / np.sqrt(n)


def upa_matrix(phi1, phi2, m_y, m_z, spacing_ratio=0.5):
    phi1 = np.asarray(phi1, dtype=float)
    phi2 = np.asarray(phi2, dtype=float)
    iy = np.repeat(np.arange(m_y), m_z)[:, None]
    iz = np.tile(np.arange(m_z), m_y)[:, None]
    phase = iy * (np.sin(phi1) * np.sin(phi2))[None, :] + iz * np.cos(phi2)[None, :]
    return np.exp(2j * np.pi * spacing_ratio * phase) / np.sqrt(m_y * m_z)


@dataclass(frozen=True)
class ChannelRealization:
    """Path angles (radians) and complex path gains of one channel draw."""

    bs_aod: np.ndarray
    ris_azimuth_in: np.ndarray
    ris_elevation_in: np.ndarray
    ris_azimuth_out: np.ndarray
    ris_elevation_out: np.ndarray
    user_aoa: np.ndarray
    gains_g: np.ndarray
    gains_t: np.ndarray

    @property
    def p_paths(self):
        return self.bs_aod.shape[0]

    @property
    def l_paths(self):
        return self.user_aoa.shape[0]


@dataclass(frozen=True)
class SteeringSet:
    """Steering matrices with unit-norm columns.

    ``a_b`` is N_b x P, ``a_u`` is N_u x L, ``a_rp`` is N_r x P and
    ``a_rL`` is N_r x L.
    """

    a_b: np.ndarray
    a_u: np.ndarray
    a_rp: np.ndarray
    a_rL: np.ndarray

    def __post_init__(self):
        a_b, a_u, a_rp, a_rL = (np.asarray(m, dtype=complex) for m in (self.a_b, self.a_u, self.a_rp, self.a_rL))
        for name, m in (("a_b", a_b), ("a_u", a_u), ("a_rp", a_rp), ("a_rL", a_rL)):
            if m.ndim != 2:
                raise DimensionError(f"{name} must be 2-D, got shape {m.shape}", key=name)
        if a_rp.shape[1] != a_b.shape[1]:
            raise DimensionError(f"a_rp has {a_rp.shape[1]} columns but a_b has {a_b.shape[1]}", key="a_rp")
        if a_rL.shape[1] != a_u.shape[1]:
            raise DimensionError(f"a_rL has {a_rL.shape[1]} columns but a_u has {a_u.shape[1]}", key="a_rL")
        if a_rL.shape[0] != a_rp.shape[0]:
            raise DimensionError(f"a_rL has {a_rL.shape[0]} rows but a_rp has {a_rp.shape[0]}", key="a_rL")
        object.__setattr__(self, "a_b", a_b)
        object.__setattr__(self, "a_u", a_u)
        object.__setattr__(self, "a_rp", a_rp)
        object.__setattr__(self, "a_rL", a_rL)

    @property
    def n_b(self):
        return self.a_b.shape[0]

    @property
    def n_u(self):
        return self.a_u.shape[0]

    @property
    def n_r(self):
        return self.a_rp.shape[0]

    @property
    def p_paths(self):
        return self.a_b.shape[1]

    @property
    def l_paths(self):
        return self.a_u.shape[1]

    def conj(self):
        return SteeringSet(self.a_b.conj(), self.a_u.conj(), self.a_rp.conj(), self.a_rL.conj())

    def check_config(self, cfg):
        expected = {
            "a_b": (cfg.n_b, cfg.p_paths),
            "a_u": (cfg.n_u, cfg.l_paths),
            "a_rp": (cfg.n_r, cfg.p_paths),
            "a_rL": (cfg.n_r, cfg.l_paths),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise DimensionError(
                    f"{name} has shape {getattr(self, name).shape}, config expects {shape}", key=name
                )
        return self


def trial_rng(master_seed, trial_index):
    """Independent generator for one trial, a pure function of (seed, index)."""
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), int(trial_index)]))


def complex_normal(rng, size):
    """Circularly symmetric CN(0, 1) samples."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)


def sample_realization(rng, cfg, angle_ranges=None):
    """Draw path angles and CN(0, 1) gains for one realization.

    ``angle_ranges`` overrides entries of :data:`DEFAULT_ANGLE_RANGES`. The
    number of variates drawn depends only on (P, L), so array sizes can be
    swept under a fixed stream without disturbing the angles.
    """
    ranges = dict(DEFAULT_ANGLE_RANGES)
    if angle_ranges:
        unknown = set(angle_ranges) - set(ranges)
        if unknown:
            raise ValidationError(f"unknown angle family: {sorted(unknown)}", key="angle_ranges")
        ranges.update(angle_ranges)
    p, l = cfg.p_paths, cfg.l_paths
    return ChannelRealization(
        bs_aod=rng.uniform(*ranges["bs_aod"], size=p),
        ris_azimuth_in=rng.uniform(*ranges["ris_azimuth"], size=p),
        ris_elevation_in=rng.uniform(*ranges["ris_elevation"], size=p),
        ris_azimuth_out=rng.uniform(*ranges["ris_azimuth"], size=l),
        ris_elevation_out=rng.uniform(*ranges["ris_elevation"], size=l),
        user_aoa=rng.uniform(*ranges["user_aoa"], size=l),
        gains_g=complex_normal(rng, p),
        gains_t=complex_normal(rng, l),
    )


def random_theta(rng, n_r):
    """Unit-modulus vector with i.i.d. uniform phases on [0, 2*pi)."""
    return np.exp(1j * rng.uniform(0.0, 2 * np.pi, size=n_r))


def steering_set(r, cfg):
    """Build the four steering matrices of realization ``r`` under ``cfg``."""
    if r.p_paths != cfg.p_paths or r.l_paths != cfg.l_paths:
        raise DimensionError(
            f"realization has (P, L)=({r.p_paths}, {r.l_paths}), config expects "
            f"({cfg.p_paths}, {cfg.l_paths})",
            key="realization",
        )
    d = cfg.spacing_ratio
    return SteeringSet(
        a_b=ula_matrix(r.bs_aod, cfg.n_b, d),
        a_u=ula_matrix(r.user_aoa, cfg.n_u, d),
        a_rp=upa_matrix(r.ris_azimuth_in, r.ris_elevation_in, cfg.n_r_y, cfg.n_r_z, d),
        a_rL=upa_matrix(r.ris_azimuth_out, r.ris_elevation_out, cfg.n_r_y, cfg.n_r_z, d),
    )


def assemble_channels(r, s, cfg):
    """Return ``(G, T)``: BS->RIS (N_r x N_b) and RIS->user (N_u x N_r) channels."""
    s.check_config(cfg)
    g = np.asarray(r.gains_g)
    t = np.asarray(r.gains_t)
    if g.shape != (cfg.p_paths,):
        raise DimensionError(f"gains_g has shape {g.shape}, expected ({cfg.p_paths},)", key="gains_g")
    if t.shape != (cfg.l_paths,):
        raise DimensionError(f"gains_t has shape {t.shape}, expected ({cfg.l_paths},)", key="gains_t")
    gp = np.sqrt(cfg.n_r * cfg.n_b / cfg.p_paths) * g
    tl = np.sqrt(cfg.n_r * cfg.n_u / cfg.l_paths) * t
    g_mat = (s.a_rp * gp[None, :]) @ s.a_b.conj().T
    t_mat = (s.a_u * tl[None, :]) @ s.a_rL.conj().T
    return g_mat, t_mat


def cascade(t_mat, theta, g_mat):
    """Effective BS->user channel ``T diag(theta) G``."""
    t_mat = np.asarray(t_mat)
    g_mat = np.asarray(g_mat)
    theta = np.asarray(theta)
    if t_mat.ndim != 2 or g_mat.ndim != 2 or theta.ndim != 1:
        raise DimensionError("cascade expects 2-D T, 1-D theta and 2-D G", key="cascade")
    if t_mat.shape[1] != theta.shape[0]:
        raise DimensionError(f"T has {t_mat.shape[1]} columns but theta has length {theta.shape[0]}", key="t_mat")
    if g_mat.shape[0] != theta.shape[0]:
        raise DimensionError(f"G has {g_mat.shape[0]} rows but theta has length {theta.shape[0]}", key="g_mat")
    return (t_mat * theta[None, :]) @ g_mat


__all__ = [
    "DEFAULT_ANGLE_RANGES",
    "ChannelRealization",
    "SteeringSet",
    "assemble_channels",
    "cascade",
    "complex_normal",
    "random_theta",
    "sample_realization",
    "steering_set",
    "trial_rng",
    "ula_matrix",
    "ula_response",
    "upa_matrix",
    "upa_response",
]
