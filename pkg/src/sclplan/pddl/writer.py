"""Canonical PDDL text: one literal per line, two-space indent."""

from __future__ import annotations

from .model import Atom, Domain, Goal, Literal, Problem


def format_atom(atom: Atom) -> str:
    return "(" + " ".join(atom) + ")"


def serialize_goal(goal: Goal, indent: str = "") -> str:
    if not goal:
        return "(and )"
    lines = ["(and"]
    lines += [f"{indent}  {lit}" for lit in goal]
    lines.append(f"{indent})")
    return "\n".join(lines)


def serialize_problem(problem: Problem) -> str:
    out = [f"(define (problem {problem.name})", f"  (:domain {problem.domain_name})", "  (:objects"]
    out += [f"    {name} - {typ}" for name, typ in problem.objects]
    out.append("  )")
    out.append("  (:init")
    out += [f"    {format_atom(a)}" for a in sorted(problem.init)]
    out.append("  )")
    out.append(f"  (:goal {serialize_goal(problem.goal, '  ')})")
    out.append(")")
    return "\n".join(out) + "\n"


def _typed(params) -> str:
    return " ".join(f"{n} - {t}" for n, t in params)


def _conjunction(literals, indent: str) -> str:
    if not literals:
        return "()"
    if len(literals) == 1:
        return str(literals[0])
    inner = "\n".join(f"{indent}  {lit}" for lit in literals)
    return f"(and\n{inner}\n{indent})"


def serialize_domain(domain: Domain) -> str:
    out = [f"(define (domain {domain.name})"]
    if domain.requirements:
        out.append(f"  (:requirements {' '.join(sorted(domain.requirements))})")
    if domain.types:
        out.append("  (:types")
        out += [f"    {c} - {p}" for c, p in domain.types.items()]
        out.append("  )")
    out.append("  (:predicates")
    for p in domain.predicates:
        params = _typed(p.params)
        out.append(f"    ({p.name}{' ' + params if params else ''})")
    out.append("  )")
    for a in domain.actions:
        out.append(f"  (:action {a.name}")
        out.append(f"    :parameters ({_typed(a.params)})")
        out.append(f"    :precondition {_conjunction(a.precondition, '    ')}")
        effects = [Literal(x) for x in a.add_effects] + [Literal(x, False) for x in a.del_effects]
        out.append(f"    :effect {_conjunction(effects, '    ')}")
        out.append("  )")
    out.append(")")
    return "\n".join(out) + "\n"


