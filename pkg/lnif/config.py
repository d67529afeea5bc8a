"""
Prover configuration and its key=value file format.

.. autosummary::
   ~ProverConfig
   ~load_config
   ~parse_config
"""

# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.

from dataclasses import dataclass, fields, replace
from warnings import warn
import logging

from .exceptions import ConfigError

logger = logging.getLogger(__name__)

_true = {"on", "true", "yes", "1"}
_false = {"off", "false", "no", "0"}


@dataclass(frozen=True)
class ProverConfig:
    """
    Search and rewrite settings.

    Parameters
    ----------
    depth : int
        Logical rule applications allowed on one branch of a search;
        ``Lift`` steps are not counted.
    witness_cap : int
        Maximal number of instances of one quantified formula in one
        component along a branch.
    memo : bool
        Reuse the outcome of a sequent already searched with the same
        remaining depth.
    parallel : bool
        Explore the premises of branching rules in a thread pool.
    check_rewrites : bool
        Re-check every node built by a transformation.
    """

    depth: int = 14
    witness_cap: int = 2
    memo: bool = True
    parallel: bool = False
    check_rewrites: bool = False

    def update(self, **kwargs):
        """Copy with the non-None keyword values replaced."""
        return replace(
            self, **{k: v for k, v in kwargs.items() if v is not None}
        )


def _convert(key, kind, text):
    if kind is bool:
        value = text.lower()
        if value in _true:
            return True
        if value in _false:
            return False
        raise ConfigError(f"'{key}' expects on/off, got '{text}'")
    try:
        value = int(text)
    except ValueError:
        raise ConfigError(f"'{key}' expects an integer, got '{text}'")
    if value < 0:
        raise ConfigError(f"'{key}' must not be negative")
    return value


def parse_config(text, base=None):
    """
    Read ``key = value`` lines.

    Blank lines and ``#`` comments are skipped. Unknown keys are warned
    about and ignored.

    Parameters
    ----------
    text : str
    base : ProverConfig, optional
        Values not given in ``text`` are taken from here.

    Returns
    -------
    config : ProverConfig
    """
    base = base or ProverConfig()
    kinds = {f.name: f.type for f in fields(ProverConfig)}
    kinds = {k: (bool if v in (bool, "bool") else int)
             for k, v in kinds.items()}
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {number}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in kinds:
            warn(f"Unknown configuration key '{key}' ignored.")
            continue
        values[key] = _convert(key, kinds[key], value)
    logger.debug("configuration values read: %s", values)
    return replace(base, **values)


def load_config(path, base=None):
    """
    Load a configuration file.

    See also
    --------
    :func:`parse_config`
    """
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as err:
        raise ConfigError(f"cannot read configuration '{path}': {err}")
    return parse_config(text, base=base)
