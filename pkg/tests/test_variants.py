"""Domain-based variant classification."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lusokit.corpus_io import CorpusRecord
from lusokit.urls import final_label, hostname_of
from lusokit.variants import Variant, classify_variant, extract_tld


class TestHostname:
    @pytest.mark.parametrize(
        "url,host",
        [
            ("https://www.example.pt/path?q=1", "www.example.pt"),
            ("http://EXAMPLE.COM.BR/x", "example.com.br"),
            ("example.pt/artigo", "example.pt"),  # scheme gets prepended
            ("https://example.com.br.", "example.com.br"),  # trailing dot
            ("ftp://files.example.org/a", "files.example.org"),
        ],
    )
    def test_hostnames(self, url, host):
        assert hostname_of(url) == host

    @pytest.mark.parametrize(
        "url",
        [
            None,
            "",
            "http://",
            "http://not a host/x",
            "http://exa mple.pt",
            "http://[weird",
        ],
    )
    def test_unusable_urls(self, url):
        assert hostname_of(url) is None


class TestFinalLabel:
    def test_takes_last_label_not_public_suffix(self):
        assert final_label("foo.example.com.br") == "br"
        assert final_label("example.pt") == "pt"
        assert final_label("localhost") == "localhost"

    def test_bare_ip_rejected(self):
        assert final_label("192.168.0.1") is None


class TestClassification:
    @pytest.mark.parametrize(
        "url,variant",
        [
            ("https://noticias.sapo.pt/x", Variant.PTPT),
            ("https://g1.globo.com.br/y", Variant.PTBR),
            ("https://example.BR/y", Variant.PTBR),
            ("https://example.com/z", Variant.DISCARD),
            ("https://example.org/z", Variant.DISCARD),
            ("http://10.0.0.1/z", Variant.DISCARD),
            (None, Variant.DISCARD),
        ],
    )
    def test_classify(self, url, variant):
        record = CorpusRecord(id="r", text="t", url=url)
        assert classify_variant(record) is variant

    def test_extract_tld(self):
        assert extract_tld("https://a.b.pt/x") == "pt"
        assert extract_tld("https://a.b.com.br/x") == "br"
        assert extract_tld(None) is None

    @given(st.text(max_size=80))
    def test_total_function_over_garbage(self, url):
        record = CorpusRecord(id="r", text="t", url=url or None)
        assert classify_variant(record) in (Variant.PTPT, Variant.PTBR, Variant.DISCARD)

    def test_partition_is_exhaustive_and_disjoint(self):
        tlds = ["pt", "br", "com", "org", "net", "de", "es"]
        records = [
            CorpusRecord(id=f"r{i}", text="t", url=f"https://site{i}.example.{tlds[i % len(tlds)]}/p")
            for i in range(700)
        ]
        buckets = {Variant.PTPT: 0, Variant.PTBR: 0, Variant.DISCARD: 0}
        for record in records:
            buckets[classify_variant(record)] += 1
        assert buckets[Variant.PTPT] == 100
        assert buckets[Variant.PTBR] == 100
        assert buckets[Variant.DISCARD] == 500
        assert sum(buckets.values()) == len(records)
