"""The 21-role graph and primary-role label sets.

Roles sharing tasks and duties are connected by an edge; each role belongs
to one of six position groups. The shipped edge list is an interpretation
of the role relationships (the exact set is not fully pinned down) and
lives in data/role_graph.json, which callers may override with their own
file of the same shape.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, ValidationError

POSITION_GROUPS = (
    "goalkeeper",
    "defender",
    "back",
    "central_midfielder",
    "winger",
    "forward",
)

CENTRAL_MIDFIELDER_ROLES = ("BWM", "HM", "DLP", "BTB", "AP")


@dataclass(frozen=True)
class Role:
    id: str
    name: str
    group: str


@dataclass(frozen=True)
class RoleGraph:
    roles: dict[str, Role]
    adjacency: dict[str, frozenset[str]]

    def __contains__(self, role_id: str) -> bool:
        return role_id in self.roles

    def role_ids(self) -> list[str]:
        return list(self.roles)

    def connected(self, role_id: str) -> frozenset[str]:
        self._check(role_id)
        return self.adjacency[role_id]

    def disconnected(self, role_id: str) -> frozenset[str]:
        """All other roles that do not share an edge with role_id."""
        self._check(role_id)
        return frozenset(self.roles) - self.adjacency[role_id] - {role_id}

    def are_connected(self, a: str, b: str) -> bool:
        self._check(a)
        self._check(b)
        return b in self.adjacency[a]

    def _check(self, role_id: str) -> None:
        if role_id not in self.roles:
            raise ValidationError(f"unknown role '{role_id}'")


def parse_role_graph(payload: dict) -> RoleGraph:
    roles: dict[str, Role] = {}
    for entry in payload.get("roles", []):
        rid = entry.get("id")
        if not rid:
            raise ConfigError("role entry without id")
        if rid in roles:
            raise ConfigError(f"duplicate role id '{rid}'")
        group = entry.get("group")
        if group not in POSITION_GROUPS:
            raise ConfigError(f"role '{rid}' has unknown group '{group}'")
        roles[rid] = Role(id=rid, name=entry.get("name", rid), group=group)
    if not roles:
        raise ConfigError("role graph has no roles")

    adjacency: dict[str, set[str]] = {rid: set() for rid in roles}
    for pair in payload.get("edges", []):
        if len(pair) != 2:
            raise ConfigError(f"edge {pair} is not a pair")
        a, b = pair
        if a == b:
            raise ConfigError(f"self-edge on '{a}'")
        for rid in (a, b):
            if rid not in roles:
                raise ConfigError(f"edge references unknown role '{rid}'")
        adjacency[a].add(b)
        adjacency[b].add(a)
    return RoleGraph(
        roles=roles,
        adjacency={rid: frozenset(neigh) for rid, neigh in adjacency.items()},
    )


def load_role_graph(path: str | Path | None = None) -> RoleGraph:
    """Load a role graph; None loads the shipped 21-role file."""
    if path is None:
        from importlib.resources import files

        text = files("rolescout.data").joinpath("role_graph.json").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"role graph is not valid JSON: {exc}") from exc
    return parse_role_graph(payload)


@dataclass(frozen=True)
class LabelSet:
    """Primary-role assignments: exactly one role per labeled player."""

    assignments: dict[str, str]
    provenance: str = "expert"

    def __len__(self) -> int:
        return len(self.assignments)

    def role_of(self, player_id: str) -> str | None:
        return self.assignments.get(player_id)

    def players_with(self, role_id: str) -> list[str]:
        return sorted(p for p, r in self.assignments.items() if r == role_id)

    def validate_against(self, graph: RoleGraph) -> None:
        unknown = sorted({r for r in self.assignments.values() if r not in graph})
        if unknown:
            raise ValidationError(f"labels use roles not in the graph: {unknown}")


def load_labels(path: str | Path) -> LabelSet:
    """Read a labels CSV (player_id,role_id) with an optional provenance comment."""
    provenance = "expert"
    assignments: dict[str, str] = {}
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            if "provenance:" in line:
                provenance = line.split("provenance:", 1)[1].strip()
            continue
        if line.strip():
            body.append(line)
    if not body:
        raise ValidationError(f"no labels in {path}")
    header = body[0].split(",")
    if header[:2] != ["player_id", "role_id"]:
        raise ValidationError("labels CSV must have header player_id,role_id")
    for line in body[1:]:
        player_id, role_id = line.split(",")[:2]
        if player_id in assignments:
            raise ValidationError(f"player '{player_id}' labeled more than once")
        assignments[player_id] = role_id
    return LabelSet(assignments=assignments, provenance=provenance)


def save_labels(labels: LabelSet, path: str | Path) -> None:
    lines = [f"# provenance: {labels.provenance}", "player_id,role_id"]
    for player_id in sorted(labels.assignments):
        lines.append(f"{player_id},{labels.assignments[player_id]}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
