from .terms import (
    App, ConstRef, CtorRef, ElimRef, IndRef, Lam, Pi, Sort, Term, Var,
    PROP, SET, TYPE0, TYPE1, TYPE2, lift, mk_app, mk_lam_telescope,
    mk_pi_telescope, pi_telescope, spine, subst, contains, replace,
    constants_in, inductives_in,
)
from .env import (
    Context, CtorDecl, Definition, DuplicateName, GlobalEnv, IllTyped,
    InductiveDecl, KernelError, PositivityViolation, SortRestriction,
    initial_env,
)
from .reduce import Evaluator, NonClosedValue, normalize, whnf
from .typing import (
    check_type, conv, declare_definition, declare_inductive,
    derive_eliminator, infer_sort, infer_type, subtype,
)
