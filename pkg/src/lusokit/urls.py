"""Hostname extraction from crawl URLs.

Crawl metadata is dirty: URLs arrive without schemes, with ports,
uppercased, with trailing dots, or as outright junk. Everything here is
total; unusable inputs map to None instead of raising.
"""

from __future__ import annotations

import re
from urllib.parse import urlsplit

# One hostname label: unicode letters/digits/underscore plus hyphen.
# Rejects whitespace, slashes, brackets and the like, which is what junk
# "hostnames" produced by lenient URL parsing look like.
_LABEL_RE = re.compile(r"^[\w-]+$")


def hostname_of(url: str | None) -> str | None:
    """Lowercased hostname of a URL, or None when no sane hostname exists.

    Scheme-less inputs ("www.site.pt/x") are parsed by prepending a
    default scheme. Ports, paths, queries, fragments and userinfo are
    stripped; a trailing dot on the hostname is removed.
    """
    if not url:
        return None
    candidate = url.strip()
    if not candidate:
        return None
    if "://" not in candidate:
        candidate = "http://" + candidate
    try:
        host = urlsplit(candidate).hostname
    except ValueError:
        return None
    if not host:
        return None
    host = host.strip(".").lower()
    if not host:
        return None
    if any(not _LABEL_RE.match(label) for label in host.split(".")):
        return None
    return host


def final_label(host: str) -> str | None:
    """Last dot-separated label of a hostname; None for bare-IP hostnames."""
    last = host.rsplit(".", 1)[-1]
    if not last or last.isdigit():
        return None
    return last
