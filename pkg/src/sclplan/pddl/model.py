"""Lifted planning artifacts: predicates, action schemas, domains, problems.

An atom is a plain tuple ``(predicate, arg1, ..., argN)``; in schemas the
arguments may be variables (``?x``).  Equality atoms use ``"="`` as their
predicate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

Atom = tuple[str, ...]

ROOT_TYPE = "object"
REQUIREMENTS = frozenset({":strips", ":typing", ":negative-preconditions", ":equality"})


def is_variable(term: str) -> bool:
    return term.startswith("?")


@dataclass(frozen=True, slots=True)
class Literal:
    atom: Atom
    positive: bool = True

    @property
    def predicate(self) -> str:
        return self.atom[0]

    @property
    def args(self) -> tuple[str, ...]:
        return self.atom[1:]

    @property
    def is_equality(self) -> bool:
        return self.atom[0] == "="

    def negate(self) -> Literal:
        return Literal(self.atom, not self.positive)

    def substitute(self, binding: dict[str, str]) -> Literal:
        return Literal((self.atom[0], *(binding.get(a, a) for a in self.atom[1:])), self.positive)

    def __str__(self) -> str:
        text = "(" + " ".join(self.atom) + ")"
        return text if self.positive else f"(not {text})"


Goal = tuple[Literal, ...]


@dataclass(frozen=True, slots=True)
class PredicateSchema:
    name: str
    params: tuple[tuple[str, str], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True, slots=True)
class ActionSchema:
    name: str
    params: tuple[tuple[str, str], ...]
    precondition: tuple[Literal, ...] = ()
    add_effects: tuple[Atom, ...] = ()
    del_effects: tuple[Atom, ...] = ()
    description: str = ""

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.params)

    def param_type(self, var: str) -> str:
        for name, typ in self.params:
            if name == var:
                return typ
        raise KeyError(var)


@dataclass(frozen=True)
class Domain:
    name: str
    requirements: frozenset[str] = frozenset()
    types: dict[str, str] = field(default_factory=dict)  # child -> parent
    predicates: tuple[PredicateSchema, ...] = ()
    actions: tuple[ActionSchema, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "_preds", {p.name: p for p in self.predicates})
        object.__setattr__(self, "_acts", {a.name: a for a in self.actions})

    def predicate(self, name: str) -> PredicateSchema | None:
        return self._preds.get(name)

    def action(self, name: str) -> ActionSchema | None:
        return self._acts.get(name)

    def has_type(self, name: str) -> bool:
        return name == ROOT_TYPE or name in self.types

    def ancestors(self, typ: str) -> list[str]:
        """``typ`` followed by its supertypes up to the root."""
        chain = [typ]
        while typ != ROOT_TYPE:
            typ = self.types.get(typ, ROOT_TYPE)
            chain.append(typ)
        return chain

    def is_subtype(self, child: str, parent: str) -> bool:
        return parent in self.ancestors(child)

    def static_predicates(self) -> frozenset[str]:
        """Predicates no action ever adds or deletes."""
        touched = {a[0] for act in self.actions for a in (*act.add_effects, *act.del_effects)}
        return frozenset(p.name for p in self.predicates if p.name not in touched)


@dataclass(frozen=True)
class Problem:
    domain_name: str
    objects: tuple[tuple[str, str], ...] = ()
    init: frozenset[Atom] = frozenset()
    goal: Goal = ()
    name: str = "task"

    def object_types(self) -> dict[str, str]:
        return dict(self.objects)
