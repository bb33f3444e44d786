"""Action catalogs for the three action sets, plus action text parsing.

Each catalog entry pairs a natural-language command (what the language
model sees) with a PDDL schema.  Schema parameters that do not appear in
the command, such as the agent's current location for a move, are
"hidden": they are bound from the current facts through one named
precondition literal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from ..pddl import Domain, Literal
from ..pddl.model import Atom

FINISH_WORDS = ("finish", "done", "stop", "task complete", "task completed")


@dataclass(frozen=True)
class CatalogEntry:
    name: str  # command as shown to the model, e.g. "go to" or "PickupObject"
    schema: str  # PDDL action name
    template: str  # e.g. "take {obj} from {recep}"
    description: str
    slots: tuple[tuple[str, str], ...]  # (slot, PDDL variable) in display order
    hidden: tuple[tuple[str, str], ...] = ()  # (PDDL variable, binding predicate)

    @property
    def arg_names(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.slots)

    def render(self, args) -> str:
        return self.template.format(**dict(zip(self.arg_names, args)))


@dataclass(frozen=True)
class ParsedAction:
    name: str  # PDDL schema name
    arguments: tuple[str, ...] = ()
    raw_text: str = ""
    is_finish: bool = False


def _e(name, schema, template, description, slots, hidden=()):
    return CatalogEntry(name, schema, template, description, tuple(slots), tuple(hidden))


_FROM = ("?from", "agentat")

CATALOGS: dict[str, tuple[CatalogEntry, ...]] = {
    "alfworld": (
        _e("go to", "go-to", "go to {recep}",
           "Walk to a receptacle. Whatever is in or on it becomes visible if it is open.",
           [("recep", "?to")], [_FROM]),
        _e("open", "open", "open {recep}",
           "Open a closed receptacle you are standing at, revealing its contents.",
           [("recep", "?r")]),
        _e("clean", "clean", "clean {obj} with {recep}",
           "Wash the object you are holding in the sink basin you are standing at.",
           [("obj", "?o"), ("recep", "?r")]),
        _e("take", "take", "take {obj} from {recep}",
           "Pick up an object from the open receptacle you are standing at. Needs an empty hand.",
           [("obj", "?o"), ("recep", "?r")]),
        _e("close", "close", "close {recep}",
           "Close an open receptacle you are standing at.",
           [("recep", "?r")]),
        _e("heat", "heat", "heat {obj} with {recep}",
           "Heat the object you are holding with the microwave you are standing at.",
           [("obj", "?o"), ("recep", "?r")]),
        _e("put", "put", "put {obj} in/on {recep}",
           "Place the object you are holding in or on the open receptacle you are standing at.",
           [("obj", "?o"), ("recep", "?r")]),
        _e("toggle", "toggle", "toggle {obj}",
           "Switch on a device such as a desk lamp located at the receptacle you are standing at.",
           [("obj", "?o")], [("?r", "in")]),
        _e("cool", "cool", "cool {obj} with {recep}",
           "Chill the object you are holding with the fridge you are standing at.",
           [("obj", "?o"), ("recep", "?r")]),
    ),
    "thor": (
        _e("MoveToObject", "movetoobject", "MoveToObject {obj}",
           "Walk up to an object or receptacle you know about.",
           [("obj", "?to")], [_FROM]),
        _e("OpenObject", "openobject", "OpenObject {recep}",
           "Open the openable object you are next to.",
           [("recep", "?r")]),
        _e("CloseObject", "closeobject", "CloseObject {recep}",
           "Close the open object you are next to.",
           [("recep", "?r")]),
        _e("PickupObject", "pickupobject", "PickupObject {obj}",
           "Pick up the object you are next to. Needs an empty hand and an open container.",
           [("obj", "?o")], [("?r", "in")]),
        _e("PlaceObject", "placeobject", "PlaceObject {obj} in {recep}",
           "Put the object you are holding into or onto the receptacle you are next to.",
           [("obj", "?o"), ("recep", "?r")]),
        _e("SliceObject", "sliceobject", "SliceObject {obj}",
           "Cut the object you are next to into slices. You must be holding a knife.",
           [("obj", "?o")], [("?k", "holding")]),
        _e("ToggleObjectOn", "toggleobjecton", "ToggleObjectOn {obj}",
           "Switch on the appliance you are next to, such as a stove burner, faucet or toaster.",
           [("obj", "?x")]),
        _e("ToggleObjectOff", "toggleobjectoff", "ToggleObjectOff {obj}",
           "Switch off the appliance you are next to.",
           [("obj", "?x")]),
    ),
    "robot": (
        _e("Sit", "sit", "Sit", "Lower the body to a resting pose. The robot cannot act while sitting.", []),
        _e("Stand", "stand", "Stand", "Stand up from a sitting pose.", []),
        _e("MoveToObject", "movetoobject", "MoveToObject {obj}",
           "Walk to an object, container or person you know about.",
           [("obj", "?to")], [_FROM]),
        _e("LookAtObject", "lookatobject", "LookAtObject {obj}",
           "Point the body camera at a known object.",
           [("obj", "?x")]),
        _e("PickupObject", "pickupobject", "PickupObject {obj}",
           "Grasp the object you are next to with the arm. Needs an empty gripper.",
           [("obj", "?o")], [("?r", "in")]),
        _e("PlaceObject", "placeobject", "PlaceObject {obj} in {recep}",
           "Put the held object into the container you are next to.",
           [("obj", "?o"), ("recep", "?r")]),
        _e("DropObject", "dropobject", "DropObject",
           "Let go of the held object right where you are standing.",
           [], [("?o", "holding"), ("?l", "agentat")]),
        _e("SpeakToHuman", "speaktohuman", "SpeakToHuman {human_name}",
           "Talk to the person you are next to and hear their reply.",
           [("human_name", "?h")]),
    ),
}


def action_catalog(action_set: str) -> tuple[CatalogEntry, ...]:
    try:
        return CATALOGS[action_set]
    except KeyError:
        raise ValueError(f"unknown action set {action_set!r}") from None


def entry_for(action_set: str, schema: str) -> CatalogEntry:
    for e in action_catalog(action_set):
        if e.schema == schema:
            return e
    raise KeyError(schema)


def ground_to_parsed(act, domain: Domain, action_set: str) -> ParsedAction:
    """Map a ground planner action back to its visible command arguments."""
    entry = entry_for(action_set, act.name)
    binding = dict(zip(domain.action(act.name).param_names, act.args))
    return ParsedAction(act.name, tuple(binding[var] for _, var in entry.slots))


def render(action_set: str, action: ParsedAction) -> str:
    if action.is_finish:
        return "finish"
    return entry_for(action_set, action.name).render(action.arguments)


@lru_cache(maxsize=None)
def _patterns(action_set: str):
    out = []
    for e in action_catalog(action_set):
        parts = []
        for tok in e.template.lower().split():
            if tok.startswith("{"):
                parts.append(r"(\S+)")
            elif tok == "in/on":
                parts.append(r"(?:in/on|in|on|into|onto)")
            else:
                parts.append(re.escape(tok))
        out.append((e, re.compile("^" + r"\s+".join(parts) + "$")))
        # compact form: "<schema or command> arg1 arg2 ..."
        names = {e.schema, e.name.lower().replace(" ", "-"), e.name.lower().replace(" ", "")}
        alt = "|".join(re.escape(n) for n in sorted(names))
        args = r"".join(r"\s+(\S+)" for _ in e.slots)
        out.append((e, re.compile(rf"^(?:{alt}){args}$")))
    return out


def normalize(text: str) -> str:
    t = text.strip().strip("`").strip()
    t = re.sub(r"^action\s*:\s*", "", t, flags=re.I)
    t = t.replace(",", " ").replace("(", " ").replace(")", " ")
    t = re.sub(r"\s+", " ", t).strip().rstrip(".").strip().lower()
    return t


def parse_action_text(action_set: str, text: str) -> ParsedAction | None:
    """Match ``text`` against the catalog; None when nothing fits."""
    t = normalize(text)
    if t in FINISH_WORDS:
        return ParsedAction("finish", (), text, True)
    for entry, pat in _patterns(action_set):
        m = pat.match(t)
        if m:
            return ParsedAction(entry.schema, tuple(m.groups()), text)
    return None


class BindingError(Exception):
    """The action cannot be instantiated against the given facts."""


_MISSING = {
    "agentat": "you have no known location",
    "holding": "you are not holding anything",
    "in": "{0} is not inside anything you know of",
}


def instantiate(action_set: str, domain: Domain, action: ParsedAction, facts: set[Atom],
                types: dict[str, str]) -> tuple[dict[str, str], list[Literal]]:
    """Bind ``action`` to a full parameter assignment and its ground preconditions.

    ``types`` maps each known object to its PDDL type; objects outside it
    are treated as nonexistent.
    """
    entry = entry_for(action_set, action.name)
    schema = domain.action(entry.schema)
    if schema is None:
        raise BindingError(f"{entry.name} is not defined in domain {domain.name}")
    if len(action.arguments) != len(entry.slots):
        raise BindingError(f"{entry.name} takes {len(entry.slots)} argument(s)")
    binding: dict[str, str] = {}
    for (_, var), arg in zip(entry.slots, action.arguments):
        if arg not in types:
            raise BindingError("you don't see that here")
        binding[var] = arg
    for var, pred in entry.hidden:
        lit = next(l for l in schema.precondition
                   if l.positive and l.predicate == pred and var in l.args)
        candidates = sorted(
            atom[1 + lit.args.index(var)]
            for atom in facts
            if atom[0] == pred and len(atom) == len(lit.atom)
            and all(binding.get(a, atom[i + 1]) == atom[i + 1] for i, a in enumerate(lit.args) if a != var)
        )
        if not candidates:
            bound = [binding.get(a, a) for a in lit.args if a != var]
            raise BindingError(_MISSING.get(pred, "a required object is unknown").format(*bound))
        binding[var] = candidates[0]
    for var, typ in schema.params:
        obj = binding[var]
        if obj not in types or not domain.is_subtype(types[obj], typ):
            raise BindingError(f"{obj} cannot be used with {entry.name}")
    return binding, [lit.substitute(binding) for lit in schema.precondition]
