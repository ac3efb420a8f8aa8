"""Append-only, generation-indexed archive of every individual ever created.

Generation 0 holds plain syntax trees. Every later individual is a record
that references earlier individuals plus the random trees its operator
used; its semantics are computed once from the memoized semantics of its
parents and stored. Nothing is ever re-expanded, which is what makes
whole-history selection free: evaluating any individual in the archive is
a dictionary lookup.

Completed generations are immutable; appending a generation requires
exclusive access.
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .data import SplitDataset
from .errors import EvalBudgetExceededError, NonFiniteSemanticsError
from .exprtree import (
    ExprTree,
    eval_tree,
    eval_tree_many,
    tree_from_json,
    tree_size,
    tree_to_json,
)
from .semantics import check_finite, rmse, semantics_of_tree, sigmoid


@dataclass(frozen=True)
class IndividualRef:
    generation: int
    index: int


@dataclass(frozen=True)
class Leaf:
    tree: ExprTree


@dataclass(frozen=True)
class Reference:
    """Zero-cost reproduction: the child is semantically its parent."""

    parent: IndividualRef


@dataclass(frozen=True)
class Crossover:
    parent1: IndividualRef
    parent2: IndividualRef
    random_tree: ExprTree


@dataclass(frozen=True)
class Mutation:
    """Semantic mutation record.

    random_tree_b set: bounded two-tree form, child = base + step*(sig(Ra)-sig(Rb)).
    random_tree_b None: literal raw form, child = base + step*Ra.
    base is an earlier individual, or an inline Crossover when a freshly
    crossed child is mutated in the same breeding step.
    """

    base: Union[IndividualRef, Crossover, Reference]
    random_tree_a: ExprTree
    random_tree_b: Optional[ExprTree]
    step: float


Payload = Union[Leaf, Reference, Crossover, Mutation]


@dataclass
class Individual:
    payload: Payload
    train_semantics: np.ndarray
    test_semantics: np.ndarray
    train_fitness: float
    test_fitness: float


class Archive:
    """All generations of one run, with memoized train/test semantics."""

    def __init__(self, split: SplitDataset, fitness=rmse):
        self.split = split
        self.train_inputs = split.train.inputs
        self.test_inputs = split.test.inputs
        self.train_targets = split.train.targets
        self.test_targets = split.test.targets
        self.fitness = fitness
        self.generations: list[list[Individual]] = []

    # -- addressing ---------------------------------------------------

    def individual(self, ref: IndividualRef) -> Individual:
        self._check_ref(ref)
        return self.generations[ref.generation][ref.index]

    def _check_ref(self, ref: IndividualRef):
        if not 0 <= ref.generation < len(self.generations):
            raise ValueError(f"no generation {ref.generation} in archive")
        if not 0 <= ref.index < len(self.generations[ref.generation]):
            raise ValueError(
                f"index {ref.index} out of range in generation {ref.generation}"
            )

    def best_of_generation(self, generation: int) -> IndividualRef:
        """Ref of the lowest-training-error individual (first on ties)."""
        gen = self.generations[generation]
        idx = min(range(len(gen)), key=lambda i: gen[i].train_fitness)
        return IndividualRef(generation, idx)

    # -- creation -----------------------------------------------------

    def make_individual(self, payload: Payload) -> Individual:
        """Compute memoized semantics and fitness for a payload (not appended)."""
        train = self._payload_semantics(payload, "train")
        test = self._payload_semantics(payload, "test")
        check_finite(train, "offspring semantics", split="train")
        check_finite(test, "offspring semantics", split="test")
        return Individual(
            payload=payload,
            train_semantics=train,
            test_semantics=test,
            train_fitness=self.fitness(train, self.train_targets),
            test_fitness=self.fitness(test, self.test_targets),
        )

    def _payload_semantics(self, payload: Payload, which: str) -> np.ndarray:
        inputs = self.train_inputs if which == "train" else self.test_inputs

        def stored(ref):
            ind = self.individual(ref)
            return ind.train_semantics if which == "train" else ind.test_semantics

        def raw(tree):
            with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
                return eval_tree_many(tree, inputs)

        if isinstance(payload, Leaf):
            return semantics_of_tree(payload.tree, inputs)
        if isinstance(payload, Reference):
            return stored(payload.parent)
        if isinstance(payload, Crossover):
            w = sigmoid(raw(payload.random_tree))
            return w * stored(payload.parent1) + (1.0 - w) * stored(payload.parent2)
        if isinstance(payload, Mutation):
            if isinstance(payload.base, IndividualRef):
                base = stored(payload.base)
            else:
                base = self._payload_semantics(payload.base, which)
            if payload.random_tree_b is None:
                delta = payload.step * raw(payload.random_tree_a)
            else:
                delta = payload.step * (
                    sigmoid(raw(payload.random_tree_a))
                    - sigmoid(raw(payload.random_tree_b))
                )
            return base + delta
        raise TypeError(f"unknown payload {payload!r}")

    def apply_crossover(
        self, p1: IndividualRef, p2: IndividualRef, random_tree: ExprTree
    ) -> Individual:
        """Semantic crossover child of two archived individuals.

        Per coordinate the child is sig(R(x))*p1 + (1-sig(R(x)))*p2, so it
        lies between its parents on every row of both splits.
        """
        self._check_ref(p1)
        self._check_ref(p2)
        return self.make_individual(Crossover(p1, p2, random_tree))

    def apply_mutation(
        self,
        parent: IndividualRef,
        random_tree_a: ExprTree,
        random_tree_b: Optional[ExprTree],
        step: float,
    ) -> Individual:
        """Semantic mutation child; step 0 is allowed for tests."""
        self._check_ref(parent)
        if step < 0:
            raise ValueError("mutation step must be >= 0")
        return self.make_individual(Mutation(parent, random_tree_a, random_tree_b, step))

    def append_generation(self, individuals: list):
        if not individuals:
            raise ValueError("cannot append an empty generation")
        if self.generations and len(individuals) != len(self.generations[0]):
            raise ValueError(
                f"generation size {len(individuals)} != population size "
                f"{len(self.generations[0])}"
            )
        self.generations.append(list(individuals))

    # -- oracle -------------------------------------------------------

    def naive_eval(self, ref: IndividualRef, x, max_expansions: int = 1_000_000) -> float:
        """Evaluate an individual by full recursive expansion on one row.

        Never touches memoized semantics; cost is exponential in the
        generation count, so this is a testing oracle for tiny archives
        only. Exceeding max_expansions payload visits raises instead of
        hanging.
        """
        self._check_ref(ref)
        budget = [max_expansions]

        def eval_payload(payload):
            budget[0] -= 1
            if budget[0] < 0:
                raise EvalBudgetExceededError(
                    f"naive_eval exceeded {max_expansions} payload expansions; "
                    "archive too large for the oracle"
                )
            if isinstance(payload, Leaf):
                return eval_tree(payload.tree, x)
            if isinstance(payload, Reference):
                return eval_ref(payload.parent)
            if isinstance(payload, Crossover):
                w = sigmoid(eval_tree(payload.random_tree, x))
                return w * eval_ref(payload.parent1) + (1.0 - w) * eval_ref(payload.parent2)
            if isinstance(payload, Mutation):
                if isinstance(payload.base, IndividualRef):
                    base = eval_ref(payload.base)
                else:
                    base = eval_payload(payload.base)
                if payload.random_tree_b is None:
                    return base + payload.step * eval_tree(payload.random_tree_a, x)
                return base + payload.step * (
                    sigmoid(eval_tree(payload.random_tree_a, x))
                    - sigmoid(eval_tree(payload.random_tree_b, x))
                )
            raise TypeError(f"unknown payload {payload!r}")

        def eval_ref(r):
            return eval_payload(self.individual(r).payload)

        return eval_payload(self.individual(ref).payload)

    # -- accounting ---------------------------------------------------

    def record_count(self) -> int:
        """Stored individual records: population size x generation count."""
        return sum(len(g) for g in self.generations)

    def count_nodes(self) -> int:
        """Records plus nodes of every distinct stored tree.

        Trees shared between records (reproduction copies) count once;
        nothing here ever expands ancestry.
        """
        seen = {}

        def visit(payload):
            if isinstance(payload, Leaf):
                trees = [payload.tree]
            elif isinstance(payload, Reference):
                trees = []
            elif isinstance(payload, Crossover):
                trees = [payload.random_tree]
            else:
                trees = [payload.random_tree_a]
                if payload.random_tree_b is not None:
                    trees.append(payload.random_tree_b)
                if not isinstance(payload.base, IndividualRef):
                    visit(payload.base)
            for t in trees:
                if id(t) not in seen:
                    seen[id(t)] = tree_size(t)

        for gen in self.generations:
            for ind in gen:
                visit(ind.payload)
        return self.record_count() + sum(seen.values())

    # -- serialization ------------------------------------------------

    def to_json(self) -> dict:
        """JSON form of the structure; semantics are recomputed on load."""
        return {
            "schema_version": 1,
            "generations": [
                [_payload_to_json(ind.payload) for ind in gen]
                for gen in self.generations
            ],
        }

    @classmethod
    def from_json(cls, obj: dict, split: SplitDataset) -> "Archive":
        archive = cls(split)
        for gen in obj["generations"]:
            individuals = [
                archive.make_individual(_payload_from_json(p)) for p in gen
            ]
            archive.append_generation(individuals)
        return archive


def _ref_to_json(ref: IndividualRef):
    return [ref.generation, ref.index]


def _payload_to_json(payload: Payload) -> dict:
    if isinstance(payload, Leaf):
        return {"kind": "leaf", "tree": tree_to_json(payload.tree)}
    if isinstance(payload, Reference):
        return {"kind": "reference", "parent": _ref_to_json(payload.parent)}
    if isinstance(payload, Crossover):
        return {
            "kind": "crossover",
            "parent1": _ref_to_json(payload.parent1),
            "parent2": _ref_to_json(payload.parent2),
            "random_tree": tree_to_json(payload.random_tree),
        }
    return {
        "kind": "mutation",
        "base": (
            _ref_to_json(payload.base)
            if isinstance(payload.base, IndividualRef)
            else _payload_to_json(payload.base)
        ),
        "random_tree_a": tree_to_json(payload.random_tree_a),
        "random_tree_b": (
            None if payload.random_tree_b is None else tree_to_json(payload.random_tree_b)
        ),
        "step": payload.step,
    }


def _payload_from_json(obj: dict) -> Payload:
    kind = obj["kind"]
    if kind == "leaf":
        return Leaf(tree_from_json(obj["tree"]))
    if kind == "reference":
        g, i = obj["parent"]
        return Reference(IndividualRef(g, i))
    if kind == "crossover":
        g1, i1 = obj["parent1"]
        g2, i2 = obj["parent2"]
        return Crossover(
            IndividualRef(g1, i1), IndividualRef(g2, i2), tree_from_json(obj["random_tree"])
        )
    if kind == "mutation":
        base = obj["base"]
        if isinstance(base, list):
            base = IndividualRef(base[0], base[1])
        else:
            base = _payload_from_json(base)
        rb = obj["random_tree_b"]
        return Mutation(
            base,
            tree_from_json(obj["random_tree_a"]),
            None if rb is None else tree_from_json(rb),
            float(obj["step"]),
        )
    raise ValueError(f"unknown payload kind {kind!r}")


def seed_archive(
    trees: list,
    split: SplitDataset,
    *,
    regenerate=None,
    rng=None,
    max_retries: int = 25,
    fitness=rmse,
) -> Archive:
    """Build a one-generation archive from generation-0 trees.

    A tree whose semantics come out non-finite (protected division keeps
    this rare) is regenerated via `regenerate(slot_index, rng)` up to
    max_retries times; without a regenerator, or past the bound, the seed
    aborts with the diagnostic rather than clamping values.
    """
    if not trees:
        raise ValueError("cannot seed an archive from an empty tree list")
    archive = Archive(split, fitness=fitness)
    individuals = []
    for slot, tree in enumerate(trees):
        attempt = 0
        while True:
            try:
                individuals.append(archive.make_individual(Leaf(tree)))
                break
            except NonFiniteSemanticsError:
                attempt += 1
                if regenerate is None or attempt > max_retries:
                    raise
                tree = regenerate(slot, rng)
    archive.append_generation(individuals)
    return archive
