"""Corpus statistics and table rendering."""

from decimal import ROUND_HALF_UP, Decimal

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lusokit.corpus_io import CorpusRecord
from lusokit.stats import CorpusStats, Scale, count_stats, render_report, render_tsv, scaled_value


def recs(*texts):
    return [CorpusRecord(id=f"r{i}", text=t) for i, t in enumerate(texts)]


class TestCounting:
    def test_examples_and_words(self):
        stats = count_stats(recs("ola mundo", "uma  frase   com espacos", ""), "d")
        assert stats.examples == 3
        assert stats.words == 2 + 4 + 0

    def test_merged(self):
        a = CorpusStats("a", examples=2, words=10)
        b = CorpusStats("b", examples=3, words=7)
        m = a.merged(b)
        assert (m.dataset_name, m.examples, m.words) == ("a", 5, 17)


class TestScaledValue:
    @pytest.mark.parametrize(
        "count,divisor,expected",
        [
            (4_100_000, 10**6, "4.1"),
            (2_728_000_000, 10**9, "2.7"),
            (16_100_000, 10**6, "16.1"),
            (4_300_000_000, 10**9, "4.3"),
            (150_000, 10**6, "0.2"),  # half rounds up
            (250_000, 10**6, "0.3"),
            (0, 10**6, "0.0"),
            (1_950_000, 10**6, "2.0"),
        ],
    )
    def test_half_up_to_one_decimal(self, count, divisor, expected):
        assert scaled_value(count, divisor) == expected

    @given(st.integers(min_value=0, max_value=10**13))
    def test_matches_decimal_oracle(self, count):
        oracle = str(
            (Decimal(count) / Decimal(10**6)).quantize(
                Decimal("0.1"), rounding=ROUND_HALF_UP
            )
        )
        assert scaled_value(count, 10**6) == oracle


class TestRendering:
    STATS = [
        CorpusStats("ptpt", examples=4_100_000, words=2_728_000_000),
        CorpusStats("ptbr", examples=16_100_000, words=4_300_000_000),
    ]

    def test_millions_billions_table(self):
        table = render_report(self.STATS, Scale.MILLIONS_BILLIONS)
        lines = table.splitlines()
        assert "examples (M)" in lines[0] and "words (B)" in lines[0]
        assert set(lines[1]) <= {"-", " "}
        assert "4.1" in lines[2] and "2.7" in lines[2]
        assert "16.1" in lines[3] and "4.3" in lines[3]

    def test_unit_table_keeps_raw_counts(self):
        table = render_report(self.STATS, Scale.UNIT)
        assert "4100000" in table
        assert "2728000000" in table

    def test_rows_preserve_input_order(self):
        table = render_report(self.STATS, Scale.UNIT)
        body = table.splitlines()[2:]
        assert body[0].startswith("ptpt")
        assert body[1].startswith("ptbr")

    def test_tsv(self):
        tsv = render_tsv(self.STATS, Scale.MILLIONS_BILLIONS)
        lines = tsv.splitlines()
        assert lines[0].split("\t") == ["dataset", "examples (M)", "words (B)"]
        assert lines[1].split("\t") == ["ptpt", "4.1", "2.7"]
