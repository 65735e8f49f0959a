"""Bisimulation modal logic: formulas, bi-models, bisimulations and proofs."""

from .errors import (BisimodError, BoundExceeded, FormatError, NotLSquare,
                     ParseError, SkeletonTooLarge, UnknownFixture, UnknownWorld,
                     ValidationError)
from .syntax import (FALSUM, Atom, BisBox, Box, Falsum, Formula, Implies,
                     atoms, is_lsquare, modal_depth, parse, render)
from .models import (LEFT, RIGHT, BiModel, KripkeModel, Point, fixture,
                     load_bimodel, save_bimodel)
from .semantics import Report, satisfies, valid_in_frame, valid_in_model
from .bisim import (BisimReport, check_conditions, distinguishing_formula,
                    is_bisimulation, max_bisimulation)
from .calculus import (Proof, check_proof, gen_harmony_proof,
                       gen_nts_tower_proof, match_axiom, parse_proof)
from .search import SearchBounds, enumerate_bimodels, find_countermodel

__version__ = "0.1.0"
