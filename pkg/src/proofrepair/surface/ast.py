"""Surface syntax trees: name-based terms and declaration items."""
from __future__ import annotations

from dataclasses import dataclass, field


class STerm:
    __slots__ = ()


@dataclass(frozen=True)
class SName(STerm):
    name: str


@dataclass(frozen=True)
class SSort(STerm):
    text: str  # Prop | Set | Type0 | Type1 | Type2


@dataclass(frozen=True)
class SNum(STerm):
    value: int


@dataclass(frozen=True)
class SApp(STerm):
    fn: STerm
    arg: STerm


@dataclass(frozen=True)
class SBind(STerm):
    # fun/forall with one binder group flattened to single binders
    kind: str  # "fun" | "forall"
    name: str
    type: STerm
    body: STerm


@dataclass(frozen=True)
class SArrow(STerm):
    lhs: STerm
    rhs: STerm


@dataclass(frozen=True)
class SElim(STerm):
    ind: str
    sort: str


@dataclass(frozen=True)
class Item:
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class IInductive(Item):
    name: str = ""
    params: tuple[tuple[str, STerm], ...] = ()
    sort: STerm | None = None
    ctors: tuple[tuple[str, STerm], ...] = ()


@dataclass(frozen=True)
class IDefinition(Item):
    name: str = ""
    type: STerm | None = None
    body: STerm | None = None
    opaque: bool = False


@dataclass(frozen=True)
class ISetoid(Item):
    carrier: STerm | None = None
    relation: STerm | None = None
    refl: STerm | None = None
    sym: STerm | None = None
    trans: STerm | None = None
    decider: STerm | None = None


@dataclass(frozen=True)
class IInstance(Item):
    name: str = ""
    signature: tuple[STerm, ...] = ()
    subject: STerm | None = None
    proof: STerm | None = None


@dataclass(frozen=True)
class SideSpec:
    carrier: STerm
    constrs: tuple[STerm, ...]
    rec: STerm
    elimprop: STerm | None
    iotas: tuple[STerm, ...]  # fwd/rev interleaved, constructor order


@dataclass(frozen=True)
class IConfiguration(Item):
    name: str = ""
    shape: str = ""
    shape_args: tuple[STerm, ...] = ()
    side_a: SideSpec | None = None
    side_b: SideSpec | None = None
    equiv_fwd: STerm | None = None
    equiv_rev: STerm | None = None
    opaques: tuple[str, ...] = ()
    pairs: tuple[tuple[STerm, STerm, STerm, STerm], ...] = ()


@dataclass(frozen=True)
class IRequire(Item):
    module: str = ""


@dataclass(frozen=True)
class ILift(Item):
    config: str = ""
    source: str = ""
    target: str = ""


@dataclass(frozen=True)
class IGenProper(Item):
    fn: str = ""
    signature: tuple[STerm, ...] = ()


@dataclass(frozen=True)
class IRegisterPair(Item):
    config: str = ""
    motive_a: STerm | None = None
    applied_a: STerm | None = None
    motive_b: STerm | None = None
    applied_b: STerm | None = None


@dataclass(frozen=True)
class IPort(Item):
    name: str = ""
    source_thm: str = ""
    lemma: str = ""
    replaced: str = ""
    replacement: str = ""
    budget: int = 4


# correspondence plan items

@dataclass(frozen=True)
class GenSpec:
    kind: str  # nat | bool | list | prod | ind
    ind: str = ""
    max: int = 0
    length: int = 0
    children: tuple["GenSpec", ...] = ()


@dataclass(frozen=True)
class PlanPair:
    src: str
    tgt: str
    args: tuple[tuple[GenSpec, str | None], ...]  # (generator, converter name or None)
    result_via: str | None
    decider: str


@dataclass(frozen=True)
class Plan:
    loads: tuple[str, ...]
    budget: int
    seed: int
    pairs: tuple[PlanPair, ...]
