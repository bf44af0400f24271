"""System Repository — phase-space realisations from systems.dat."""

import re
from typing import List

from config import get_settings
from models.dynamics import SystemSpec
from repositories.base import cached_loader, read_records, split_assignment, split_list
from utils.validators import ParseError, UnknownLabelError

_S_KEY = re.compile(r"^S(\d+)$")


def load_systems(path=None) -> List[SystemSpec]:
    return _load_systems(str(path or get_settings().system_path))


@cached_loader
def _load_systems(path: str) -> List[SystemSpec]:
    systems = []
    for record in read_records(path, "system"):
        values = {}
        S = {}
        for body in record.body:
            key, value = split_assignment(record, body)
            match = _S_KEY.match(key)
            if match:
                S[int(match.group(1)) - 1] = value
            else:
                values[key] = value
        for required in ("bialgebra", "coords", "momenta"):
            if required not in values:
                raise ParseError(record.where(), f"system {record.header}: missing '{required}'")
        if sorted(S) != list(range(len(S))) or not S:
            raise ParseError(record.where(), f"system {record.header}: S1..Sn must be contiguous")
        try:
            hamiltonian = int(values.get("hamiltonian", "2"))
        except ValueError:
            raise ParseError(record.where(), "hamiltonian must be an integer power")
        systems.append(SystemSpec(
            name=record.header,
            bialgebra=values["bialgebra"],
            coords=tuple(split_list(values["coords"])),
            momenta=tuple(split_list(values["momenta"])),
            S=tuple(S[i] for i in range(len(S))),
            hamiltonian=hamiltonian,
            conserved=tuple(split_list(values.get("conserved", ""))),
            invariant=values.get("invariant", ""),
            line=record.line,
        ))
    return systems


def get_system(name: str, path=None) -> SystemSpec:
    for system in load_systems(path):
        if system.name == name:
            return system
    raise UnknownLabelError("system", f"no system {name!r}")
