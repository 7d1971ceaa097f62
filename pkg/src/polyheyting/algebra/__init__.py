"""Set algebras of monotone families over Kripke systems."""
from .space import (AlgebraElement, AlgebraError, NotMonotone, Space, bottom, cyl, cyl_iterated, debug_enabled,
                    diag, dim_set, element_of, himp, join, join_all, meet, meet_all, set_debug, space_of,
                    subst, subst_repl, top, ucyl, ucyl_iterated, ucyl_literal)
from .setalg import (ClosureOverflow, NotASubuniverse, SetAlgebra, check_closed, dimset_bound_report,
                     generated, neat_reduct, random_system, subalgebra_closure, subst_dimset_bound)
from .axioms import SuiteReport, axiom_suite, schemas
from .theory import (InconsistentTheory, Interpolation, TheoryPair, certify, complete_theory,
                     completion_exists_backtracking, interpolant, interpolant_search, is_complete,
                     is_consistent, is_saturated)
from .dilation import Dilation, DilationError, DilationReport, ReplacementAlgebra, dilate, has_slack
