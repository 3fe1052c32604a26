"""Recursive-descent parser for declarations, terms, and plan files."""
from __future__ import annotations

from .ast import (
    GenSpec, IConfiguration, IDefinition, IGenProper, IInductive, IInstance,
    ILift, IPort, IRegisterPair, IRequire, ISetoid, Item, Plan, PlanPair,
    SApp, SArrow, SBind, SElim, SideSpec, SName, SNum, SSort, STerm,
)
from .lexer import ParseError, Token, tokenize

SORTS = ("Prop", "Set", "Type0", "Type1", "Type2")

# tokens that terminate a term
_STOPPERS = {":=", ";", ".", ")", "{", "}", "==>", "~", "|", ",", ":"}


class Parser:
    def __init__(self, src: str):
        self.toks = tokenize(src)
        self.pos = 0

    # -- token helpers ------------------------------------------------------
    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text!r}", t.line)
        return t

    def expect_ident(self) -> str:
        t = self.next()
        if t.kind != "IDENT":
            raise ParseError(f"expected a name, found {t.text!r}", t.line)
        return t.text

    def expect_num(self) -> int:
        t = self.next()
        if t.kind != "NUM":
            raise ParseError(f"expected a number, found {t.text!r}", t.line)
        return int(t.text)

    def at(self, text: str) -> bool:
        return self.peek().text == text

    # -- terms --------------------------------------------------------------
    def term(self) -> STerm:
        t = self.peek()
        if t.text in ("fun", "forall"):
            self.next()
            binders = self.binders()
            self.expect("=>" if t.text == "fun" else ",")
            body = self.term()
            for name, ty in reversed(binders):
                body = SBind(t.text, name, ty, body)
            return body
        return self.arrow()

    def arrow(self) -> STerm:
        lhs = self.app()
        if self.at("->"):
            self.next()
            return SArrow(lhs, self.term())
        return lhs

    def app(self) -> STerm:
        fn = self.atom()
        while True:
            t = self.peek()
            if t.kind == "EOF" or t.text in _STOPPERS or t.text in ("->", "=>"):
                return fn
            if t.text in ("fun", "forall"):
                # allow e.g. `f (fun x => ...)` only with parens; a bare fun
                # after an application head is a user error caught later
                return fn
            fn = SApp(fn, self.atom())

    def atom(self) -> STerm:
        t = self.next()
        if t.text == "(":
            inner = self.term()
            self.expect(")")
            return inner
        if t.kind == "NUM":
            return SNum(int(t.text))
        if t.text in SORTS:
            return SSort(t.text)
        if t.text == "elim":
            self.expect("(")
            ind = self.expect_ident()
            self.expect(",")
            sort = self.next().text
            if sort not in SORTS:
                raise ParseError(f"bad eliminator sort {sort!r}", t.line)
            self.expect(")")
            return SElim(ind, sort)
        if t.kind == "IDENT":
            return SName(t.text)
        raise ParseError(f"unexpected token {t.text!r} in term", t.line)

    def binders(self) -> list[tuple[str, STerm]]:
        out: list[tuple[str, STerm]] = []
        while self.at("("):
            self.next()
            names = [self.expect_ident()]
            while not self.at(":"):
                names.append(self.expect_ident())
            self.expect(":")
            ty = self.term()
            self.expect(")")
            out.extend((n, ty) for n in names)
        if not out:
            raise ParseError("expected at least one binder", self.peek().line)
        return out

    def atoms_until(self, *stop: str) -> list[STerm]:
        out = []
        while self.peek().text not in stop:
            out.append(self.atom())
        return out

    # -- items --------------------------------------------------------------
    def items(self) -> list[Item]:
        out = []
        while self.peek().kind != "EOF":
            out.append(self.item())
        return out

    def item(self) -> Item:
        t = self.peek()
        line = t.line
        if t.text == "Require":
            self.next()
            mod = self.expect_ident()
            self.expect(".")
            return IRequire(line, mod)
        if t.text == "Inductive":
            return self.inductive(line)
        if t.text in ("Definition", "Opaque"):
            return self.definition(line)
        if t.text == "Setoid":
            return self.setoid(line)
        if t.text == "Instance":
            return self.instance(line)
        if t.text == "Configuration":
            return self.configuration(line)
        if t.text == "Lift":
            self.next()
            cfg = self.expect_ident()
            self.expect("in")
            src = self.expect_ident()
            self.expect("as")
            tgt = self.expect_ident()
            self.expect(".")
            return ILift(line, cfg, src, tgt)
        if t.text == "GenProper":
            self.next()
            fn = self.expect_ident()
            self.expect(":")
            sig = [self.term()]
            while self.at("==>"):
                self.next()
                sig.append(self.term())
            self.expect(".")
            return IGenProper(line, fn, tuple(sig))
        if t.text == "RegisterPair":
            self.next()
            cfg = self.expect_ident()
            ma = self.atom()
            aa = self.atom()
            self.expect("~")
            mb = self.atom()
            ab = self.atom()
            self.expect(".")
            return IRegisterPair(line, cfg, ma, aa, mb, ab)
        if t.text == "Port":
            self.next()
            name = self.expect_ident()
            self.expect("from")
            thm = self.expect_ident()
            self.expect("by")
            lemma = self.expect_ident()
            self.expect("replacing")
            repl = self.expect_ident()
            self.expect("with")
            by = self.expect_ident()
            budget = 4
            if self.at("budget"):
                self.next()
                budget = self.expect_num()
            self.expect(".")
            return IPort(line, name, thm, lemma, repl, by, budget)
        raise ParseError(f"unknown declaration {t.text!r}", line)

    def inductive(self, line: int) -> IInductive:
        self.expect("Inductive")
        name = self.expect_ident()
        params = self.binders() if self.at("(") else []
        self.expect(":")
        sort = self.term()
        self.expect(":=")
        if self.at("|"):
            self.next()
        ctors = []
        while not self.at("."):
            cname = self.expect_ident()
            self.expect(":")
            cty = self.term()
            ctors.append((cname, cty))
            if self.at("|"):
                self.next()
                continue
            break
        self.expect(".")
        return IInductive(line, name, tuple(params), sort, tuple(ctors))

    def definition(self, line: int) -> IDefinition:
        opaque = False
        if self.at("Opaque"):
            self.next()
            opaque = True
        self.expect("Definition")
        name = self.expect_ident()
        binders = self.binders() if self.at("(") else []
        self.expect(":")
        ty = self.term()
        self.expect(":=")
        body = self.term()
        self.expect(".")
        for bname, bty in reversed(binders):
            ty = SBind("forall", bname, bty, ty)
            body = SBind("fun", bname, bty, body)
        return IDefinition(line, name, ty, body, opaque)

    def setoid(self, line: int) -> ISetoid:
        self.expect("Setoid")
        carrier = self.term()
        self.expect(":=")
        relation = self.term()
        self.expect("{")
        fields: dict[str, STerm] = {}
        while not self.at("}"):
            key = self.expect_ident()
            if key not in ("refl", "sym", "trans", "decider"):
                raise ParseError(f"unknown setoid field {key!r}", self.peek().line)
            fields[key] = self.term()
            self.expect(";")
        self.expect("}")
        self.expect(".")
        for req in ("refl", "sym", "trans"):
            if req not in fields:
                raise ParseError(f"setoid is missing {req!r}", line)
        return ISetoid(line, carrier, relation, fields["refl"], fields["sym"],
                       fields["trans"], fields.get("decider"))

    def instance(self, line: int) -> IInstance:
        self.expect("Instance")
        name = self.expect_ident()
        self.expect(":")
        self.expect("Proper")
        self.expect("(")
        sig = [self.term()]
        while self.at("==>"):
            self.next()
            sig.append(self.term())
        self.expect(")")
        subject = self.term()
        self.expect(":=")
        proof = self.term()
        self.expect(".")
        return IInstance(line, name, tuple(sig), subject, proof)

    def configuration(self, line: int) -> IConfiguration:
        self.expect("Configuration")
        name = self.expect_ident()
        self.expect("{")
        shape = ""
        shape_args: tuple[STerm, ...] = ()
        sides: dict[str, SideSpec] = {}
        equiv_fwd = equiv_rev = None
        opaques: list[str] = []
        pairs: list[tuple[STerm, STerm, STerm, STerm]] = []
        while not self.at("}"):
            key = self.expect_ident()
            if key == "shape":
                shape = self.expect_ident()
                shape_args = tuple(self.atoms_until(";"))
                self.expect(";")
            elif key == "side":
                which = self.expect_ident()
                if which not in ("A", "B"):
                    raise ParseError("side must be A or B", line)
                sides[which] = self.side()
            elif key == "equiv":
                equiv_fwd = self.atom()
                equiv_rev = self.atom()
                self.expect(";")
            elif key == "opaque":
                while not self.at(";"):
                    opaques.append(self.expect_ident())
                self.expect(";")
            elif key == "pairs":
                ma = self.atom()
                aa = self.atom()
                self.expect("~")
                mb = self.atom()
                ab = self.atom()
                pairs.append((ma, aa, mb, ab))
                self.expect(";")
            else:
                raise ParseError(f"unknown configuration field {key!r}", line)
        self.expect("}")
        if "A" not in sides or "B" not in sides:
            raise ParseError("configuration needs side A and side B", line)
        return IConfiguration(line, name, shape, shape_args, sides["A"],
                              sides["B"], equiv_fwd, equiv_rev,
                              tuple(opaques), tuple(pairs))

    def side(self) -> SideSpec:
        self.expect("{")
        carrier = None
        constrs: list[STerm] = []
        rec = None
        elimprop = None
        iotas: list[STerm] = []
        while not self.at("}"):
            key = self.expect_ident()
            if key == "carrier":
                carrier = self.term()
            elif key == "constrs":
                constrs = self.atoms_until(";")
            elif key == "rec":
                rec = self.term()
            elif key == "elimprop":
                elimprop = self.term()
            elif key == "iota":
                iotas = self.atoms_until(";")
            else:
                raise ParseError(f"unknown side field {key!r}", self.peek().line)
            self.expect(";")
        self.expect("}")
        if carrier is None or rec is None:
            raise ParseError("side needs carrier and rec", self.peek().line)
        return SideSpec(carrier, tuple(constrs), rec, elimprop, tuple(iotas))

    # -- plans ---------------------------------------------------------------
    def plan(self) -> Plan:
        self.expect("plan")
        self.expect("{")
        loads: list[str] = []
        budget, seed = 100000, 0
        pairs: list[PlanPair] = []
        while not self.at("}"):
            key = self.expect_ident()
            if key == "load":
                loads.append(self.expect_ident())
                self.expect(";")
            elif key == "budget":
                budget = self.expect_num()
                self.expect(";")
            elif key == "seed":
                seed = self.expect_num()
                self.expect(";")
            elif key == "pair":
                pairs.append(self.plan_pair())
            else:
                raise ParseError(f"unknown plan field {key!r}", self.peek().line)
        self.expect("}")
        return Plan(tuple(loads), budget, seed, tuple(pairs))

    def plan_pair(self) -> PlanPair:
        src = self.expect_ident()
        self.expect("~")
        tgt = self.expect_ident()
        self.expect("args")
        args: list[tuple[GenSpec, str | None]] = []
        while self.at("("):
            spec = self.genspec()
            via = None
            if self.at("via"):
                self.next()
                name = self.expect_ident()
                via = None if name == "id" else name
            args.append((spec, via))
        self.expect("result")
        self.expect("via")
        name = self.expect_ident()
        result_via = None if name == "id" else name
        self.expect("decider")
        dec = self.expect_ident()
        self.expect(";")
        return PlanPair(src, tgt, tuple(args), result_via, dec)

    def genspec(self) -> GenSpec:
        self.expect("(")
        kind = self.expect_ident()
        spec: GenSpec
        if kind == "nat":
            self.expect("max")
            spec = GenSpec("nat", max=self.expect_num())
        elif kind == "bool":
            spec = GenSpec("bool")
        elif kind == "prod":
            a = self.genspec()
            b = self.genspec()
            spec = GenSpec("prod", children=(a, b))
        elif kind == "list":
            elem = self.genspec()
            self.expect("len")
            spec = GenSpec("list", length=self.expect_num(), children=(elem,))
        else:
            self.expect("max")
            spec = GenSpec("ind", ind=kind, max=self.expect_num())
        self.expect(")")
        return spec


def parse_items(src: str) -> list[Item]:
    return Parser(src).items()


def parse_plan(src: str) -> Plan:
    return Parser(src).plan()


def parse_term(src: str) -> STerm:
    p = Parser(src)
    t = p.term()
    if p.peek().kind != "EOF":
        raise ParseError(f"trailing input {p.peek().text!r}", p.peek().line)
    return t
