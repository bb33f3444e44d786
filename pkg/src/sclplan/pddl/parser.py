"""Recursive-descent reader for the typed STRIPS subset used by the planner.

Supported requirements are ``:strips :typing :negative-preconditions
:equality``.  Conditional effects, quantifiers and numeric fluents are
rejected with a ParseError.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping

from . import sexpr
from .errors import GoalParseError, ParseError, SemanticError
from .model import (
    REQUIREMENTS,
    ROOT_TYPE,
    ActionSchema,
    Atom,
    Domain,
    Goal,
    Literal,
    PredicateSchema,
    Problem,
    is_variable,
)
from .sexpr import SList, Symbol


def _fail(node, message: str) -> ParseError:
    return ParseError(message, node.line, node.col)


def _sym(node, what: str) -> str:
    if not isinstance(node, Symbol):
        raise _fail(node, f"expected {what}, found a list")
    return node.name


def _list(node, what: str) -> SList:
    if not isinstance(node, SList):
        raise _fail(node, f"expected {what}, found {node.name!r}")
    return node


def _typed_list(node: SList | Iterable, default: str = ROOT_TYPE) -> list[tuple[str, str, Symbol]]:
    """Parse ``a b - t c`` into [(a, t), (b, t), (c, default)]."""
    out: list[tuple[str, str, Symbol]] = []
    pending: list[Symbol] = []
    items = list(node)
    i = 0
    while i < len(items):
        item = items[i]
        if not isinstance(item, Symbol):
            raise _fail(item, "expected a name in typed list, found a list")
        if item.name == "-":
            if i + 1 >= len(items):
                raise _fail(item, "expected a type name after '-'")
            typ = _sym(items[i + 1], "type name")
            if typ == "either" or not pending:
                raise _fail(items[i + 1], "expected names before '-' and a simple type after it")
            out.extend((p.name, typ, p) for p in pending)
            pending = []
            i += 2
            continue
        pending.append(item)
        i += 1
    out.extend((p.name, default, p) for p in pending)
    return out


def _header(root: SList, kind: str) -> str:
    if root.head() != "define":
        raise _fail(root, "expected 'define'")
    if len(root) < 2:
        raise _fail(root, f"expected ({kind} <name>)")
    h = _list(root[1], f"({kind} <name>)")
    if h.head() != kind or len(h) != 2:
        raise _fail(h, f"expected ({kind} <name>)")
    return _sym(h[1], f"{kind} name")


# -- domains ----------------------------------------------------------------


def parse_domain(text: str) -> Domain:
    root = sexpr.read(text)
    name = _header(root, "domain")
    requirements: set[str] = set()
    types: dict[str, str] = {}
    predicates: list[PredicateSchema] = []
    raw_actions: list[SList] = []
    for section in root.items[2:]:
        section = _list(section, "a domain section")
        key = section.head()
        if key == ":requirements":
            for flag in section.items[1:]:
                f = _sym(flag, "requirement flag")
                if f not in REQUIREMENTS:
                    raise _fail(flag, f"unsupported requirement {f}")
                requirements.add(f)
        elif key == ":types":
            for child, parent, sym in _typed_list(section.items[1:]):
                if child == ROOT_TYPE:
                    continue
                if child in types:
                    raise SemanticError(f"type {child} declared twice (line {sym.line})")
                types[child] = parent
        elif key == ":predicates":
            seen: set[str] = set()
            for p in section.items[1:]:
                p = _list(p, "a predicate declaration")
                pname = _sym(p[0], "predicate name") if len(p) else None
                if pname is None:
                    raise _fail(p, "expected predicate name")
                if pname in seen:
                    raise SemanticError(f"predicate {pname} declared twice")
                seen.add(pname)
                params = _typed_list(p.items[1:])
                _check_unique([v for v, _, _ in params], f"predicate {pname}")
                predicates.append(PredicateSchema(pname, tuple((v, t) for v, t, _ in params)))
        elif key == ":action":
            raw_actions.append(section)
        else:
            raise _fail(section, f"unsupported domain section {key!r}")

    _check_types(types)
    declared = set(types) | {ROOT_TYPE}
    for parent in types.values():
        if parent not in declared:
            raise SemanticError(f"undeclared type {parent}")
    for p in predicates:
        for _, t in p.params:
            if t not in declared:
                raise SemanticError(f"undeclared type {t} in predicate {p.name}")

    draft = Domain(name, frozenset(requirements), types, tuple(predicates), ())
    actions = [_parse_action(a, draft) for a in raw_actions]
    _check_unique([a.name for a in actions], "action list")
    return Domain(name, frozenset(requirements), types, tuple(predicates), tuple(actions))


def _check_unique(names: list[str], where: str) -> None:
    seen: set[str] = set()
    for n in names:
        if n in seen:
            raise SemanticError(f"duplicate name {n} in {where}")
        seen.add(n)


def _check_types(types: dict[str, str]) -> None:
    for start in types:
        seen = {start}
        t = types[start]
        while t != ROOT_TYPE and t in types:
            if t in seen:
                raise SemanticError(f"type hierarchy has a cycle through {t}")
            seen.add(t)
            t = types[t]


def _parse_action(node: SList, domain: Domain) -> ActionSchema:
    if len(node) < 2:
        raise _fail(node, "expected action name")
    name = _sym(node[1], "action name")
    fields: dict[str, object] = {}
    items = node.items[2:]
    if len(items) % 2:
        raise _fail(node, f"action {name}: expected keyword/value pairs")
    for key, value in zip(items[::2], items[1::2]):
        k = _sym(key, "action keyword")
        if k not in (":parameters", ":precondition", ":effect"):
            raise _fail(key, f"unsupported action keyword {k}")
        fields[k] = value

    params: list[tuple[str, str]] = []
    if ":parameters" in fields:
        for v, t, sym in _typed_list(_list(fields[":parameters"], "parameter list")):
            if not is_variable(v):
                raise _fail(sym, f"expected a variable, found {v!r}")
            if not domain.has_type(t):
                raise SemanticError(f"undeclared type {t} in action {name}")
            params.append((v, t))
    _check_unique([v for v, _ in params], f"parameters of {name}")
    scope = dict(params)

    pre: tuple[Literal, ...] = ()
    if ":precondition" in fields:
        pre = _condition(fields[":precondition"], domain, scope, f"action {name}", allow_equality=True)
    adds: list[Atom] = []
    dels: list[Atom] = []
    if ":effect" in fields:
        for lit in _condition(fields[":effect"], domain, scope, f"action {name}", allow_equality=False):
            (adds if lit.positive else dels).append(lit.atom)
    both = set(adds) & set(dels)
    if both:
        raise SemanticError(f"action {name} both adds and deletes {sorted(both)[0]}")
    return ActionSchema(name, tuple(params), pre, tuple(adds), tuple(dels))


def _condition(node, domain: Domain, scope: Mapping[str, str], where: str, *,
               allow_equality: bool) -> tuple[Literal, ...]:
    node = _list(node, "a condition")
    if not len(node):
        return ()
    if node.head() == "and":
        return tuple(
            _literal(_list(c, "a literal"), domain, scope, where, allow_equality) for c in node.items[1:]
        )
    return (_literal(node, domain, scope, where, allow_equality),)


def _literal(node: SList, domain: Domain, scope: Mapping[str, str] | None, where: str,
             allow_equality: bool) -> Literal:
    positive = True
    if node.head() == "not":
        if len(node) != 2:
            raise _fail(node, "expected (not <atom>)")
        node = _list(node[1], "an atom inside not")
        positive = False
    head = node.head()
    if head is None:
        raise _fail(node, "expected a predicate name")
    if head in ("and", "or", "forall", "exists", "when", "imply", "not"):
        raise _fail(node, f"unsupported connective {head!r} in {where}")
    args = tuple(_sym(a, "an argument") for a in node.items[1:])
    if head == "=":
        if not allow_equality:
            raise _fail(node, f"equality is not allowed in {where}")
        if len(args) != 2:
            raise SemanticError(f"equality takes 2 arguments in {where}")
    else:
        schema = domain.predicate(head)
        if schema is None:
            raise SemanticError(f"unknown predicate {head} in {where}")
        if schema.arity != len(args):
            raise SemanticError(
                f"predicate {head} expects {schema.arity} arguments, got {len(args)} in {where}"
            )
        if scope is not None:
            for a, (_, ptype) in zip(args, schema.params):
                if is_variable(a) and a in scope and not _compatible(domain, scope[a], ptype):
                    raise SemanticError(f"argument {a} of {head} has incompatible type in {where}")
    if scope is not None:
        for a in args:
            if not is_variable(a):
                raise SemanticError(f"unknown constant {a} in {where}")
            if a not in scope:
                raise SemanticError(f"unbound variable {a} in {where}")
    return Literal((head, *args), positive)


def _compatible(domain: Domain, a: str, b: str) -> bool:
    return domain.is_subtype(a, b) or domain.is_subtype(b, a)


# -- problems ---------------------------------------------------------------


def parse_problem(text: str, domain: Domain) -> Problem:
    root = sexpr.read(text)
    name = _header(root, "problem")
    domain_name = None
    objects: list[tuple[str, str]] = []
    init: list[Atom] = []
    goal: Goal = ()
    for section in root.items[2:]:
        section = _list(section, "a problem section")
        key = section.head()
        if key == ":domain":
            if len(section) != 2:
                raise _fail(section, "expected (:domain <name>)")
            domain_name = _sym(section[1], "domain name")
        elif key == ":objects":
            for obj, typ, sym in _typed_list(section.items[1:]):
                if not domain.has_type(typ):
                    raise SemanticError(f"object {obj} has undeclared type {typ}")
                objects.append((obj, typ))
        elif key == ":init":
            for a in section.items[1:]:
                lit = _literal(_list(a, "an init atom"), domain, None, "init", False)
                if not lit.positive:
                    raise _fail(a, "negative literals are not allowed in init")
                init.append(lit.atom)
        elif key == ":goal":
            if len(section) != 2:
                raise _fail(section, "expected (:goal <condition>)")
            goal = _condition(section[1], domain, None, "goal", allow_equality=True)
        else:
            raise _fail(section, f"unsupported problem section {key!r}")
    if domain_name is None:
        raise _fail(root, "missing (:domain <name>)")
    if domain_name != domain.name:
        raise SemanticError(f"problem is for domain {domain_name}, not {domain.name}")
    _check_unique([o for o, _ in objects], "objects")
    types = dict(objects)
    for atom in init:
        _check_ground(atom, domain, types, "init")
    for lit in goal:
        _check_ground(lit.atom, domain, types, "goal")
    return Problem(domain_name, tuple(objects), frozenset(init), goal, name)


def _check_ground(atom: Atom, domain: Domain, types: Mapping[str, str], where: str,
                  error=SemanticError) -> None:
    schema = domain.predicate(atom[0])
    for i, obj in enumerate(atom[1:]):
        if is_variable(obj):
            raise error(f"variable {obj} in {where}")
        if obj not in types:
            raise error(f"unknown object {obj} in {where}")
        if schema is not None and types[obj] is not None and not domain.is_subtype(types[obj], schema.params[i][1]):
            raise error(f"object {obj} has type {types[obj]}, but {atom[0]} expects "
                        f"{schema.params[i][1]} in {where}")


# -- goals from untrusted text ---------------------------------------------


def parse_goal(text: str, domain: Domain,
               objects: Mapping[str, str] | Iterable | None = None) -> Goal:
    """Extract a ground conjunctive goal from free text.

    The first balanced expression headed by ``and`` wins; otherwise the first
    expression that reads as a single literal.  ``objects`` (names, or a
    name -> type mapping) enables object checks; pass None to defer them.
    """
    span = None
    fallback = None
    for s in sexpr.balanced_spans(text):
        head = sexpr.span_head(s)
        if head == "and":
            span = s
            break
        if fallback is None and (head == "not" or domain.predicate(head) is not None):
            fallback = s
    if span is None:
        span = fallback
    if span is None:
        for s in sexpr.balanced_spans(text):
            head = sexpr.span_head(s)
            if head and not head.startswith(":"):
                span = s
                break
    if span is None:
        raise GoalParseError("no goal expression found in the response")
    try:
        node = sexpr.read(span)
        goal = _condition(node, domain, None, "goal", allow_equality=True)
    except ParseError as exc:
        raise GoalParseError(f"malformed goal: {exc.message}") from exc
    except SemanticError as exc:
        raise GoalParseError(str(exc)) from exc
    if objects is not None:
        types = dict(objects) if isinstance(objects, Mapping) else _as_types(objects)
        for lit in goal:
            if lit.is_equality:
                for o in lit.args:
                    if o not in types:
                        raise GoalParseError(f"unknown object {o} in goal")
                continue
            _check_ground(lit.atom, domain, types, "goal", error=GoalParseError)
    else:
        for lit in goal:
            for a in lit.args:
                if is_variable(a):
                    raise GoalParseError(f"variable {a} in goal")
    return goal


def _as_types(objects: Iterable) -> dict[str, str | None]:
    # bare names carry no type, so only membership is checked
    out: dict[str, str | None] = {}
    for o in objects:
        if isinstance(o, tuple):
            out[o[0]] = o[1]
        else:
            out[str(o).lower()] = None
    return out
