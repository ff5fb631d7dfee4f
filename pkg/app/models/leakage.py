"""
Leakage patterns, random leakage models and receiver observations.

Receivers are 1-based in every field of these models. `in_neighbors()` is
the 0-based view the evaluators use.
"""

from fractions import Fraction
from itertools import combinations, product
from math import lcm
from typing import Annotated, Any, ClassVar, Iterable, Iterator, List, Literal, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from pydantic import Field, model_validator

from app.models.base import FrozenModel, Rational
from app.utils.rationals import binomial

Edge = Tuple[int, int]


class LeakagePattern(FrozenModel):
    """Directed graph over receivers; edge (j, i) means i observes s_j."""

    n: int = Field(ge=1)
    edges: Tuple[Edge, ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _sort_edges(cls, data: Any) -> Any:
        if isinstance(data, dict) and "edges" in data:
            data = dict(data)
            data["edges"] = tuple(sorted(tuple(int(v) for v in edge) for edge in data["edges"]))
        return data

    @model_validator(mode="after")
    def _check(self) -> "LeakagePattern":
        seen = set()
        for source, target in self.edges:
            if not (1 <= source <= self.n and 1 <= target <= self.n):
                raise ValueError("edge endpoint outside 1..n")
            if source == target:
                raise ValueError("leakage pattern has a self-loop")
            if (source, target) in seen:
                raise ValueError("leakage pattern has a duplicate edge")
            seen.add((source, target))
        return self

    @classmethod
    def empty(cls, n: int) -> "LeakagePattern":
        return cls(n=n, edges=())

    @classmethod
    def cycle(cls, n: int) -> "LeakagePattern":
        """Receiver i sees receiver i + 1, and receiver n sees receiver 1."""
        if n < 2:
            raise ValueError("a leakage cycle needs at least two receivers")
        return cls(n=n, edges=tuple((receiver % n + 1, receiver) for receiver in range(1, n + 1)))

    @classmethod
    def from_graph(cls, n: int, graph: nx.DiGraph) -> "LeakagePattern":
        """From a networkx digraph over 0-based receivers."""
        return cls(n=n, edges=tuple((int(u) + 1, int(v) + 1) for u, v in graph.edges()))

    def graph(self) -> nx.DiGraph:
        """networkx view over 0-based receivers."""
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from((source - 1, target - 1) for source, target in self.edges)
        return graph

    def in_neighbors(self) -> Tuple[Tuple[int, ...], ...]:
        """Sorted 0-based in-neighbors of each 0-based receiver."""
        incoming: List[List[int]] = [[] for _ in range(self.n)]
        for source, target in self.edges:
            incoming[target - 1].append(source - 1)
        return tuple(tuple(sorted(sources)) for sources in incoming)

    def max_in_degree(self) -> int:
        return max((len(sources) for sources in self.in_neighbors()), default=0)


def _clique_graph(n: int, chosen: Iterable[int]) -> nx.DiGraph:
    graph = nx.complete_graph(list(chosen), create_using=nx.DiGraph)
    graph.add_nodes_from(range(n))
    return graph


def _broadcast_graph(n: int, chosen: Iterable[int]) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from((j, i) for j in chosen for i in range(n) if i != j)
    return graph


def _star_graph(n: int, center: int, leakers: Iterable[int]) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from((j, center) for j in leakers)
    return graph


def _sample_subset(rng: np.random.Generator, pool: Sequence[int], size: int) -> List[int]:
    if size == 0:
        return []
    return sorted(int(v) for v in rng.choice(np.asarray(pool), size=size, replace=False))


class FixedModel(FrozenModel):
    kind: Literal["fixed"] = "fixed"
    pattern: LeakagePattern

    @property
    def n(self) -> int:
        return self.pattern.n

    def support_size(self) -> int:
        return 1

    def support(self) -> Iterator[Tuple[Fraction, LeakagePattern]]:
        yield Fraction(1), self.pattern

    def draw(self, rng: np.random.Generator) -> LeakagePattern:
        return self.pattern

    def max_in_degree(self) -> int:
        return self.pattern.max_in_degree()


class _Parametric(FrozenModel):
    n: int = Field(ge=1)
    k: int = Field(ge=0)

    max_k_offset: ClassVar[int] = 1  # k <= n - offset

    @model_validator(mode="after")
    def _check_k(self) -> "_Parametric":
        if self.k > self.n - self.max_k_offset:
            raise ValueError(f"k must be within 0..{self.n - self.max_k_offset}")
        return self


class KStar(_Parametric):
    """A random center observes k random other receivers."""

    kind: Literal["kstar"] = "kstar"

    def support_size(self) -> int:
        return self.n * binomial(self.n - 1, self.k)

    def support(self) -> Iterator[Tuple[Fraction, LeakagePattern]]:
        weight = Fraction(1, self.support_size())
        for center in range(self.n):
            others = [j for j in range(self.n) if j != center]
            for leakers in combinations(others, self.k):
                yield weight, LeakagePattern.from_graph(self.n, _star_graph(self.n, center, leakers))

    def draw(self, rng: np.random.Generator) -> LeakagePattern:
        center = int(rng.integers(self.n))
        others = [j for j in range(self.n) if j != center]
        return LeakagePattern.from_graph(self.n, _star_graph(self.n, center, _sample_subset(rng, others, self.k)))

    def max_in_degree(self) -> int:
        return self.k


class KClique(_Parametric):
    """All edges among k random receivers."""

    kind: Literal["kclique"] = "kclique"
    max_k_offset: ClassVar[int] = 0

    def support_size(self) -> int:
        return binomial(self.n, self.k)

    def support(self) -> Iterator[Tuple[Fraction, LeakagePattern]]:
        weight = Fraction(1, self.support_size())
        for chosen in combinations(range(self.n), self.k):
            yield weight, LeakagePattern.from_graph(self.n, _clique_graph(self.n, chosen))

    def draw(self, rng: np.random.Generator) -> LeakagePattern:
        return LeakagePattern.from_graph(self.n, _clique_graph(self.n, _sample_subset(rng, range(self.n), self.k)))

    def max_in_degree(self) -> int:
        return max(self.k - 1, 0)


class KBroadcast(_Parametric):
    """k random receivers' signals are seen by everyone."""

    kind: Literal["kbroadcast"] = "kbroadcast"
    max_k_offset: ClassVar[int] = 0

    def support_size(self) -> int:
        return binomial(self.n, self.k)

    def support(self) -> Iterator[Tuple[Fraction, LeakagePattern]]:
        weight = Fraction(1, self.support_size())
        for chosen in combinations(range(self.n), self.k):
            yield weight, LeakagePattern.from_graph(self.n, _broadcast_graph(self.n, chosen))

    def draw(self, rng: np.random.Generator) -> LeakagePattern:
        chosen = _sample_subset(rng, range(self.n), self.k)
        return LeakagePattern.from_graph(self.n, _broadcast_graph(self.n, chosen))

    def max_in_degree(self) -> int:
        return min(self.k, self.n - 1)


class KErdosRenyi(_Parametric):
    """Every receiver independently observes k random others."""

    kind: Literal["ker"] = "ker"

    def support_size(self) -> int:
        return binomial(self.n - 1, self.k) ** self.n

    def support(self) -> Iterator[Tuple[Fraction, LeakagePattern]]:
        weight = Fraction(1, self.support_size())
        choices = [
            list(combinations([j for j in range(self.n) if j != i], self.k)) for i in range(self.n)
        ]
        for picks in product(*choices):
            graph = nx.DiGraph()
            graph.add_nodes_from(range(self.n))
            graph.add_edges_from((j, i) for i, sources in enumerate(picks) for j in sources)
            yield weight, LeakagePattern.from_graph(self.n, graph)

    def draw(self, rng: np.random.Generator) -> LeakagePattern:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.n))
        for i in range(self.n):
            others = [j for j in range(self.n) if j != i]
            graph.add_edges_from((j, i) for j in _sample_subset(rng, others, self.k))
        return LeakagePattern.from_graph(self.n, graph)

    def max_in_degree(self) -> int:
        return self.k


class MixtureComponent(FrozenModel):
    weight: Rational
    pattern: LeakagePattern


class FiniteMixture(FrozenModel):
    """Finite mixture of fixed patterns with rational weights."""

    kind: Literal["mixture"] = "mixture"
    components: Tuple[MixtureComponent, ...] = Field(min_length=1)

    @model_validator(mode="after")
    def _check(self) -> "FiniteMixture":
        if any(component.weight <= 0 for component in self.components):
            raise ValueError("mixture weights must be positive")
        if sum((component.weight for component in self.components), Fraction(0)) != 1:
            raise ValueError("mixture weights do not sum to 1")
        if len({component.pattern.n for component in self.components}) != 1:
            raise ValueError("mixture patterns disagree on n")
        return self

    @property
    def n(self) -> int:
        return self.components[0].pattern.n

    def support_size(self) -> int:
        return len(self.components)

    def support(self) -> Iterator[Tuple[Fraction, LeakagePattern]]:
        for component in self.components:
            yield component.weight, component.pattern

    def draw(self, rng: np.random.Generator) -> LeakagePattern:
        # inverse-CDF on an exact uniform draw over the common denominator
        denominator = lcm(*(component.weight.denominator for component in self.components))
        ticket = Fraction(int(rng.integers(denominator)), denominator)
        running = Fraction(0)
        for component in self.components:
            running += component.weight
            if ticket < running:
                return component.pattern
        return self.components[-1].pattern

    def max_in_degree(self) -> int:
        return max(component.pattern.max_in_degree() for component in self.components)


LeakageModel = Annotated[
    Union[FixedModel, KStar, KClique, KBroadcast, KErdosRenyi, FiniteMixture],
    Field(discriminator="kind"),
]


class Observation(FrozenModel):
    """
    A receiver's information set: own symbol plus leaked (sender, symbol) pairs.

    Receivers and senders are 1-based; symbols are indices into the
    receivers' alphabets.
    """

    receiver: int = Field(ge=1)
    own: int = Field(ge=0)
    leaked: Tuple[Tuple[int, int], ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _sort_leaks(cls, data: Any) -> Any:
        if isinstance(data, dict) and "leaked" in data:
            data = dict(data)
            data["leaked"] = tuple(sorted(tuple(int(v) for v in pair) for pair in data["leaked"]))
        return data

    @model_validator(mode="after")
    def _check(self) -> "Observation":
        senders = [sender for sender, _ in self.leaked]
        if len(set(senders)) != len(senders):
            raise ValueError("leaked senders must be distinct")
        if self.receiver in senders:
            raise ValueError("a receiver cannot leak to itself")
        if any(sender < 1 for sender in senders):
            raise ValueError("leaked sender outside 1..n")
        return self

    @classmethod
    def from_symbols(
        cls,
        alphabets: Sequence[Sequence[str]],
        receiver: int,
        own: str,
        leaked: Optional[Sequence[Tuple[int, str]]] = None,
    ) -> "Observation":
        """Build an observation from symbol names instead of indices."""
        return cls(
            receiver=receiver,
            own=list(alphabets[receiver - 1]).index(own),
            leaked=tuple((j, list(alphabets[j - 1]).index(symbol)) for j, symbol in (leaked or ())),
        )
