"""Canonical improper affine spheres of Lagrangian germs, their on-shell caustics and singularities."""
from .caustic import CausticSample, CausticSet, caustic_points, family_caustic, parametric_caustic, singular_locus
from .classify import ClassifierInconsistency, SingularityClass, classify
from .construct import (GeneratingFamily, IASMap, builtin, cc_sp_transform, center_chord_maps, gen_family,
                        holomorphic_extension, ias_maps, special_maps)
from .germ import LagrangianGerm, jets, load_germ, normalize_cubic, recenter, save_germ
from .polyjet import Poly
from .verify import CheckReport, check_family_consistency, check_hamiltonian, check_monge_ampere, check_shell
from .versal import OddDeformation, Verdict, default_catalog, is_versal, stability_check

__version__ = "0.1.0"
