"""Spectral energy-stable optimizers for matrix parameters.

The package bundles the rank-k spectral optimizer in its analysis form
(per-mode relaxed auxiliary variables in the gradient's singular basis)
and its practical form (normalized, momentum, top-k reweighting), the
scalar auxiliary-variable baselines it generalizes, standard first-order
baselines, small benchmark problems with exact constants, per-step
theorem checkers, and a CLI harness writing deterministic CSV ledgers.
"""
from .diagnostics import (
    RateEstimate,
    TrajectoryRecord,
    check_eta_condition,
    check_mode_dissipation,
    check_positivity,
    estimate_rate,
)
from .errors import (
    ConfigError,
    EnergyDomainError,
    InvalidArgumentError,
    NonFiniteDataError,
    RateFitError,
    ShapeMismatchError,
    SpecmuonError,
    SpectralStabilityError,
)
from .linalg import (
    SvdFactors,
    frobenius_inner,
    frobenius_norm,
    newton_schulz_orthogonalize,
    thin_svd,
)
from .optimizers import (
    Adam,
    AdamW,
    GradientDescent,
    Muon,
    Rsav,
    Sav,
    SpecMuonPractical,
    SpecMuonTheory,
    make_optimizer,
    optimizer_names,
)
from .optimizers.sav import rsav_xi
from .problems import (
    LeastSquaresInstance,
    SmallMlpRegression,
    SpectrumQuadratic,
    finite_diff_grad,
    make_problem,
)

__version__ = "0.1.0"

__all__ = [
    "Adam",
    "AdamW",
    "ConfigError",
    "EnergyDomainError",
    "GradientDescent",
    "InvalidArgumentError",
    "LeastSquaresInstance",
    "Muon",
    "NonFiniteDataError",
    "RateEstimate",
    "RateFitError",
    "Rsav",
    "Sav",
    "ShapeMismatchError",
    "SmallMlpRegression",
    "SpecMuonPractical",
    "SpecMuonTheory",
    "SpecmuonError",
    "SpectralStabilityError",
    "SpectrumQuadratic",
    "SvdFactors",
    "TrajectoryRecord",
    "check_eta_condition",
    "check_mode_dissipation",
    "check_positivity",
    "estimate_rate",
    "finite_diff_grad",
    "frobenius_inner",
    "frobenius_norm",
    "make_optimizer",
    "make_problem",
    "newton_schulz_orthogonalize",
    "optimizer_names",
    "rsav_xi",
    "thin_svd",
    "__version__",
]
