"""Pipeline configuration file loading.

One YAML file drives the whole pipeline. Validation is strict: unknown
keys are rejected (a typo should fail loudly, not silently fall back to
a default) and every referenced file must exist at load time. Relative
paths are resolved against the config file's own directory.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from lusokit.curation import RULE_NAMES, Blocklist, FilterConfig, load_default_stopwords
from lusokit.errors import ConfigurationError
from lusokit.packing import TruncationSchedule

_TOP_KEYS = {"workdir", "curation", "blocklist", "packing", "experiments", "translation"}

_SECTION_KEYS = {
    "curation": {
        "min_words",
        "max_words",
        "max_char_repetition_ratio",
        "max_word_repetition_ratio",
        "max_special_char_ratio",
        "min_stopword_ratio",
        "stopword_min_words",
        "max_flagged_word_ratio",
        "stopword_file",
        "flagged_words_file",
        "enabled_rules",
    },
    "blocklist": {"exact_file", "suffix_file"},
    "packing": {"vocab_file", "schedule", "global_batch", "devices"},
    "experiments": {
        "roster_file",
        "template",
        "store_dir",
        "max_workers",
        "split_seed",
    },
    "translation": {"endpoint", "target", "cache_dir", "batch_size", "max_retries"},
}

_PATH_KEYS = {
    "stopword_file",
    "flagged_words_file",
    "exact_file",
    "suffix_file",
    "vocab_file",
    "roster_file",
}


def load_word_list(path: str | Path) -> frozenset[str]:
    """One word per line; blanks and '#' comment lines are skipped."""
    out = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.strip()
        if word and not word.startswith("#"):
            out.add(word)
    return frozenset(out)


def load_domain_list(path: str | Path) -> frozenset[str]:
    """One domain per line, lowercased; blanks and comments skipped."""
    out = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        entry = line.strip().lower()
        if entry and not entry.startswith("#"):
            out.add(entry)
    return frozenset(out)


@dataclass(frozen=True)
class PipelineConfig:
    """Validated pipeline settings, sections kept as plain mappings."""

    path: Path
    workdir: Optional[Path] = None
    curation: dict = field(default_factory=dict)
    blocklist: dict = field(default_factory=dict)
    packing: dict = field(default_factory=dict)
    experiments: dict = field(default_factory=dict)
    translation: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        try:
            raw = yaml.safe_load(path.read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"config {path} is not valid YAML: {exc}") from None
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigurationError(f"config {path} must be a mapping at top level")
        unknown = set(raw) - _TOP_KEYS
        if unknown:
            raise ConfigurationError(
                f"config {path} has unknown top-level keys: {sorted(unknown)}"
            )
        sections: dict[str, dict] = {}
        for name, allowed in _SECTION_KEYS.items():
            section = raw.get(name, {})
            if section is None:
                section = {}
            if not isinstance(section, dict):
                raise ConfigurationError(f"config section '{name}' must be a mapping")
            bad = set(section) - allowed
            if bad:
                raise ConfigurationError(
                    f"config section '{name}' has unknown keys: {sorted(bad)}"
                )
            resolved = {}
            for key, value in section.items():
                if key in _PATH_KEYS:
                    if not isinstance(value, str) or not value:
                        raise ConfigurationError(
                            f"config {name}.{key} must be a file path string"
                        )
                    candidate = (path.parent / value).resolve()
                    if not candidate.exists():
                        raise ConfigurationError(
                            f"config {name}.{key} points to a missing file: {candidate}"
                        )
                    resolved[key] = candidate
                else:
                    resolved[key] = value
            sections[name] = resolved
        workdir = None
        if "workdir" in raw:
            if not isinstance(raw["workdir"], str) or not raw["workdir"]:
                raise ConfigurationError("config workdir must be a path string")
            workdir = (path.parent / raw["workdir"]).resolve()
        return cls(
            path=path,
            workdir=workdir,
            curation=sections["curation"],
            blocklist=sections["blocklist"],
            packing=sections["packing"],
            experiments=sections["experiments"],
            translation=sections["translation"],
        )

    def make_filter_config(self) -> FilterConfig:
        """Build quality-rule settings, defaults filled from the package."""
        section = dict(self.curation)
        stopwords = (
            load_word_list(section.pop("stopword_file"))
            if "stopword_file" in section
            else load_default_stopwords()
        )
        flagged = (
            load_word_list(section.pop("flagged_words_file"))
            if "flagged_words_file" in section
            else frozenset()
        )
        enabled = section.pop("enabled_rules", None)
        kwargs: dict[str, Any] = dict(section)
        kwargs["stopword_list"] = stopwords
        kwargs["flagged_word_list"] = flagged
        if enabled is not None:
            if not isinstance(enabled, list):
                raise ConfigurationError("curation.enabled_rules must be a list")
            kwargs["enabled_rules"] = frozenset(str(r) for r in enabled)
        try:
            return FilterConfig(**kwargs)
        except TypeError as exc:
            raise ConfigurationError(f"bad curation settings: {exc}") from None

    def make_blocklist(self) -> Blocklist:
        exact = (
            load_domain_list(self.blocklist["exact_file"])
            if "exact_file" in self.blocklist
            else frozenset()
        )
        suffix = (
            load_domain_list(self.blocklist["suffix_file"])
            if "suffix_file" in self.blocklist
            else frozenset()
        )
        return Blocklist(exact_domains=exact, suffix_domains=suffix)

    def make_schedule(self) -> Optional[TruncationSchedule]:
        if "schedule" not in self.packing:
            return None
        return TruncationSchedule.parse(str(self.packing["schedule"]))
