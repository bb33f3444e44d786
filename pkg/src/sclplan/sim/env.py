"""Deterministic household text-world.

The ground-truth scene is a SceneGraph whose ``discovered`` set is the set
of entities revealed to the agent so far.  Explicit actions follow the
bundled PDDL schemas exactly; implicit physics and dialogue run afterwards.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace

from ..pddl import Domain, Literal
from ..world import NOWHERE, Observation, SceneGraph, pddl_type, scene_atoms
from .catalog import BindingError, ParsedAction, entry_for, instantiate, parse_action_text, render
from .rules import RULES, chill, run_rules
from .tasks import TaskSpec, UnknownTask, load_domain

# predicates whose truth lives on the agent rather than on an entity
AGENT_PREDICATES = ("agentat", "holding", "handempty", "issitting")


@dataclass(frozen=True)
class ActionResult:
    observation: Observation
    step_counted: bool = True

    @property
    def success(self) -> bool:
        return self.observation.success


@dataclass
class SimState:
    task: TaskSpec
    scene: SceneGraph
    rules: tuple
    rng_seed: int = 0
    steps: int = 0
    chilling: frozenset[str] = frozenset()
    dialogue_done: bool = False
    log: list = field(default_factory=list)  # (action text, success) per step
    last_text: str = ""


def all_atoms(scene: SceneGraph) -> set[tuple[str, ...]]:
    return scene_atoms(scene, frozenset(scene.entities))


def holds(lit: Literal, atoms: set) -> bool:
    if lit.is_equality:
        return (lit.args[0] == lit.args[1]) == lit.positive
    return (lit.atom in atoms) == lit.positive


def check_goal(state: SimState, task: TaskSpec | None = None) -> bool:
    """Evaluate the task's success condition on ground truth."""
    task = task or state.task
    atoms = all_atoms(state.scene)
    return all(holds(lit, atoms) for lit in task.success)


def apply_atoms(scene: SceneGraph, adds, dels) -> SceneGraph:
    """Apply STRIPS add/delete sets to a scene (deletes first, adds win)."""
    entities = dict(scene.entities)
    relations = set(scene.relations)
    location, holding, flags = scene.agent.location, scene.agent.holding, set(scene.agent.flags)
    for atoms, value in ((dels, False), (adds, True)):
        for atom in atoms:
            pred, args = atom[0], atom[1:]
            if pred == "agentat":
                if value:
                    location = args[0]
                elif location == args[0]:
                    location = NOWHERE
            elif pred == "holding":
                if value:
                    holding = args[0]
                elif holding == args[0]:
                    holding = None
            elif pred == "handempty":
                pass  # implied by holding
            elif len(args) == 0:
                (flags.add if value else flags.discard)(pred)
            elif len(args) == 2:
                (relations.add if value else relations.discard)((args[0], pred, args[1]))
            else:
                entities[args[0]] = entities[args[0]].set_dynamic(pred, value)
    agent = replace(scene.agent, location=location, holding=holding, flags=frozenset(flags))
    return replace(scene, entities=entities, relations=frozenset(relations), agent=agent)


def _words(pred: str) -> str:
    return {
        "isopen": "open", "isclean": "clean", "ishot": "hot", "iscold": "cold",
        "istoggled": "switched on", "issliced": "sliced", "iscooked": "cooked",
        "isfilled": "filled", "islookedat": "in view", "isreceptacle": "a receptacle",
        "pickupable": "something you can pick up", "openable": "something that opens",
        "toggleable": "something you can switch", "sliceable": "something you can slice",
        "cookable": "cookable", "heatsource": "a heat source", "coolsource": "a cooler",
        "cleansource": "a sink", "watersource": "a tap", "brewer": "a coffee maker",
        "iscutter": "a cutting tool", "ishuman": "a person", "isdrink": "a drink",
    }.get(pred, pred)


def explain(lit: Literal, state: SceneGraph) -> str:
    """Templated reason for an unmet precondition literal."""
    pred, args = lit.predicate, lit.args
    if lit.is_equality:
        return f"You are already at {args[0]}." if not lit.positive else "That makes no sense."
    if pred == "agentat":
        return f"You need to be at {args[0]} to do that."
    if pred == "holding":
        return f"You are not holding {args[0]}."
    if pred == "handempty":
        return f"Your hands are full; you are holding {state.agent.holding}."
    if pred == "issitting":
        return "You are sitting down." if not lit.positive else "You are not sitting."
    if pred in ("in", "on", "at"):
        return f"{args[0]} is not in {args[1]}."
    if pred == "isopen":
        return f"{args[0]} is closed." if lit.positive else f"{args[0]} is already open."
    if pred == "istoggled":
        return f"{args[0]} is switched off." if lit.positive else f"{args[0]} is already switched on."
    if lit.positive:
        return f"{args[0]} is not {_words(pred)}."
    return f"{args[0]} is already {_words(pred)}."


_DONE = {
    "go-to": "You arrive at {to}.",
    "movetoobject": "You arrive at {to}.",
    "open": "You open {r}.",
    "openobject": "You open {r}.",
    "close": "You close {r}.",
    "closeobject": "You close {r}.",
    "take": "You pick up {o} from {r}.",
    "pickupobject": "You pick up {o}.",
    "put": "You put {o} in/on {r}.",
    "placeobject": "You put {o} in {r}.",
    "clean": "You clean {o} using {r}.",
    "heat": "You heat {o} using {r}.",
    "cool": "You cool {o} using {r}.",
    "toggle": "You turn on {o}.",
    "toggleobjecton": "You turn on {x}.",
    "toggleobjectoff": "You turn off {x}.",
    "sliceobject": "You slice {o} with {k}.",
    "sit": "You sit down.",
    "stand": "You stand up.",
    "lookatobject": "You look at {x}.",
    "dropobject": "You drop {o} at {l}.",
    "speaktohuman": "You speak to {h}.",
}


class HouseholdEnv:
    """One episode's simulator.  Not thread-safe; make one per episode."""

    def __init__(self):
        self.state: SimState | None = None
        self.domain: Domain | None = None

    # -- lifecycle -------------------------------------------------------

    def reset(self, task: TaskSpec, seed: int = 0) -> Observation:
        if not isinstance(task, TaskSpec):
            raise UnknownTask(str(task))
        self.domain = load_domain(task.action_set)
        scene = task.layout
        if seed:
            scene = _shuffle_distractors(scene, task, seed)
        hidden = {s for s, rel, o in scene.relations}
        scene = replace(scene, discovered=frozenset(set(scene.entities) - hidden), merged=frozenset())
        self.state = SimState(task, scene, RULES[task.action_set], seed)
        self.state.scene = self._reveal(self.state.scene)
        visible = sorted(e for e in self.state.scene.discovered if e != scene.agent.location)
        where = scene.agent.location
        text = (f"You are at {where}. " if where != NOWHERE else "You are in the middle of a room. ")
        text += f"Looking around you, you see {_listing(visible)}."
        empty = replace(scene, entities={}, relations=frozenset(), discovered=frozenset())
        return self._observation(empty, self.state.scene, text, True)

    def check_goal(self) -> bool:
        return check_goal(self._require())

    # -- stepping --------------------------------------------------------

    def step(self, action_text: str) -> ActionResult:
        st = self._require()
        st.steps += 1
        st.last_text = action_text
        before = st.scene
        parsed = parse_action_text(st.task.action_set, action_text)
        if parsed is None:
            return self._fail(before, "Nothing happens. That is not an action you can take here.")
        if parsed.is_finish:
            return self._fail(before, "You declare the task finished.")
        try:
            binding, pre = instantiate(st.task.action_set, self.domain, parsed,
                                       scene_atoms(before), _known_types(before, self.domain))
        except BindingError as err:
            return self._fail(before, f"Nothing happens. {_sentence(str(err))}")
        atoms = scene_atoms(before)
        unmet = [lit for lit in pre if not holds(lit, atoms)]
        if unmet:
            return self._fail(before, "Nothing happens. " + explain(unmet[0], before))
        scene = self.apply_explicit(parsed, binding)
        text = _DONE[parsed.name].format(**{k.lstrip("?"): v for k, v in binding.items()})
        if parsed.name == "speaktohuman":
            scene, reply = self._dialogue(scene, binding["?h"])
            text += f' {binding["?h"]} says: "{reply}"'
        explicit = scene
        scene, _ = run_rules(scene, st.rules)
        if st.task.action_set == "thor":
            scene, st.chilling = chill(scene, st.chilling)
        scene = self._reveal(scene)
        st.scene = scene
        st.log.append((action_text, True))
        text += self._narrate(before, explicit, scene)
        return ActionResult(self._observation(before, scene, text, True))

    def apply_explicit(self, parsed: ParsedAction, binding: dict[str, str]) -> SceneGraph:
        """Ground-truth scene after the schema effects only (no rules, no reveal)."""
        schema = self.domain.action(entry_for(self._require().task.action_set, parsed.name).schema)
        adds = [Literal(a).substitute(binding).atom for a in schema.add_effects]
        dels = [Literal(a).substitute(binding).atom for a in schema.del_effects]
        return apply_atoms(self.state.scene, adds, dels)

    def render(self, parsed: ParsedAction) -> str:
        return render(self._require().task.action_set, parsed)

    # -- internals -------------------------------------------------------

    def _require(self) -> SimState:
        if self.state is None:
            raise RuntimeError("reset() must be called before stepping")
        return self.state

    def _fail(self, scene: SceneGraph, text: str) -> ActionResult:
        st = self.state
        after = scene
        if st.task.action_set == "thor":
            # time passes even when the action fails
            after, st.chilling = chill(scene, st.chilling)
            st.scene = after
            text += self._narrate(scene, scene, after)
        st.log.append((st.last_text, False))
        return ActionResult(self._observation(scene, after, text, False))

    def _dialogue(self, scene: SceneGraph, human: str) -> tuple[SceneGraph, str]:
        st = self.state
        dlg = st.task.dialogue
        if dlg is None or dlg.human != human:
            return scene, "Hello there."
        if st.dialogue_done:
            return scene, dlg.thanks
        gifts = [x for x in scene.contents(human) if scene.entities[x].has(dlg.wants)]
        if not gifts:
            return scene, dlg.ask
        st.dialogue_done = True
        person = scene.entities[human].set_dynamic("isopen", True)
        return replace(scene, entities={**scene.entities, human: person}), dlg.thanks

    def _reveal(self, scene: SceneGraph) -> SceneGraph:
        """Reveal the contents of the open thing the agent stands at, recursively."""
        loc = scene.agent.location
        if loc not in scene.entities or not scene.entities[loc].has("isopen"):
            return scene
        found = set(scene.discovered)
        frontier = [loc]
        while frontier:
            cur = frontier.pop()
            for x in scene.contents(cur):
                if x not in found:
                    found.add(x)
                if scene.entities[x].has("isopen"):
                    frontier.append(x)
        return replace(scene, discovered=frozenset(found))

    def _narrate(self, before: SceneGraph, explicit: SceneGraph, after: SceneGraph) -> str:
        """Describe newly revealed things and side effects of the physics rules."""
        parts = []
        new = after.discovered - before.discovered
        shown = set()
        for holder in sorted({o for s, rel, o in after.relations if s in new}):
            items = sorted(s for s in after.contents(holder) if s in after.discovered)
            if holder in shown or not items:
                continue
            shown.add(holder)
            parts.append(f"In/on {holder}, you see {_listing(items)}.")
        gone = sorted((before.discovered - after.discovered) - set(after.entities))
        for g in gone:
            pieces = sorted(e for e in new if e.startswith(g + "-slice-"))
            if pieces:
                parts.append(f"{g} is now in pieces: {_listing(pieces)}.")
        for eid in sorted(after.discovered & set(explicit.entities)):
            old, cur = explicit.entities[eid], after.entities[eid]
            for pred in sorted({p for p, _ in old.dynamic | cur.dynamic}):
                if cur.value(pred) and not old.value(pred):
                    parts.append(f"{eid} is now {_words(pred)}.")
        return "".join(" " + p for p in parts)

    def _observation(self, before: SceneGraph, after: SceneGraph, text: str, success: bool) -> Observation:
        st = self.state
        seen_before, seen_after = before.discovered, after.discovered
        revealed = tuple(after.entities[e] for e in sorted(seen_after - seen_before))
        removed = tuple(sorted(seen_before - seen_after))
        deltas = []
        for eid in sorted(seen_before & seen_after):
            old, cur = before.entities[eid], after.entities[eid]
            for pred in sorted({p for p, _ in old.dynamic | cur.dynamic}):
                if bool(old.value(pred)) != bool(cur.value(pred)):
                    deltas.append((eid, pred, bool(cur.value(pred))))

        def visible(scene, seen):
            return {r for r in scene.relations if r[0] in seen and r[2] in seen}

        rb, ra = visible(before, seen_before), visible(after, seen_after)
        rel_deltas = tuple([(*r, False) for r in sorted(rb - ra) if r[0] in seen_after and r[2] in seen_after]
                           + [(*r, True) for r in sorted(ra - rb)])
        return Observation(text, success, revealed, tuple(deltas), rel_deltas, after.agent, removed, st.steps)


def _known_types(scene: SceneGraph, domain: Domain) -> dict[str, str]:
    return {e: pddl_type(scene.entities[e], domain) for e in scene.discovered if e in scene.entities}


def _listing(items) -> str:
    items = list(items)
    if not items:
        return "nothing"
    if len(items) <= 2:
        return " and ".join(items)
    return ", ".join(items[:-1]) + ", and " + items[-1]


def _sentence(s: str) -> str:
    s = s.strip()
    return (s[0].upper() + s[1:] + ("" if s.endswith(".") else ".")) if s else s


def _shuffle_distractors(scene: SceneGraph, task: TaskSpec, seed: int) -> SceneGraph:
    """Permute containers among pickupable objects the task never mentions."""
    named = {a for lit in task.success for a in lit.args}
    for text in task.reference:
        named.update(text.lower().split())
    movable = sorted(
        s for s, rel, o in scene.relations
        if rel == "in" and s not in named and scene.entities[s].has("pickupable")
        and not scene.contents(s)
    )
    if len(movable) < 2:
        return scene
    spots = [scene.container_of(m) for m in movable]
    random.Random(f"layout:{task.id}:{seed}").shuffle(spots)
    relations = {r for r in scene.relations if r[0] not in movable}
    relations.update((m, "in", o) for m, o in zip(movable, spots))
    return replace(scene, relations=frozenset(relations))
