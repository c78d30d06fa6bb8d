"""Combined hyperboloidal and flat foliation of 1+1 Minkowski space, a coupled
wave/Klein-Gordon solver and executable checks of the energy method on it."""
from .cutoffs import CutoffProfile, chi, chi_prime, rho, xi
from .energy import (EnergyBreakdown, cone_energy, energy_identity_residual, high_order_energy,
                     slice_energy)
from .foliation import (FoliationChart, PointBelowFoliation, RegionTag, T_flat, T_of, build_chart,
                        classify, dT_ds, dT_dx, s_of)
from .frames import FrameKind, frame_00, is_null_form, transform_tensor, transition
from .grid import FieldHistory, Operator, vector_field_operator
from .solver import (ModelParams, RunConfig, RunRecord, initial_data, kg_transform,
                     manufactured_forcing, run, step)
from .weights import WeightParams, weight, zeta

__version__ = "0.1.0"

__all__ = [
    "CutoffProfile", "chi", "chi_prime", "rho", "xi",
    "EnergyBreakdown", "cone_energy", "energy_identity_residual", "high_order_energy", "slice_energy",
    "FoliationChart", "PointBelowFoliation", "RegionTag", "T_flat", "T_of", "build_chart", "classify",
    "dT_ds", "dT_dx", "s_of",
    "FrameKind", "frame_00", "is_null_form", "transform_tensor", "transition",
    "FieldHistory", "Operator", "vector_field_operator",
    "ModelParams", "RunConfig", "RunRecord", "initial_data", "kg_transform", "manufactured_forcing",
    "run", "step",
    "WeightParams", "weight", "zeta",
]
