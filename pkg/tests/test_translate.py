"""Translation client plumbing: batching, retries, bisection, cache."""

import threading

import pytest

from lusokit.translate import (
    AuthenticationError,
    FakeReversingClient,
    PermanentTranslationError,
    TransientTranslationError,
    TranslationCache,
    translate_dataset,
)


class ScriptedClient:
    """Programmable client: per-text failure modes, call recording."""

    def __init__(self, transient_failures=0, permanent_texts=(), auth_fail=False):
        self.remaining_transient = transient_failures
        self.permanent_texts = set(permanent_texts)
        self.auth_fail = auth_fail
        self.calls = []
        self.lock = threading.Lock()

    def translate_batch(self, texts, target):
        with self.lock:
            self.calls.append(tuple(texts))
            if self.auth_fail:
                raise AuthenticationError("bad key")
            if self.remaining_transient > 0:
                self.remaining_transient -= 1
                raise TransientTranslationError("rate limited")
            bad = [t for t in texts if t in self.permanent_texts]
            if bad:
                raise PermanentTranslationError(f"cannot translate {bad[0]!r}")
            return [f"[{target}] {t}" for t in texts]


def no_sleep(_):
    pass


class TestHappyPath:
    def test_batches_and_order(self):
        client = ScriptedClient()
        texts = [f"texto {i}" for i in range(7)]
        outcome = translate_dataset(texts, "PT-PT", client, batch_size=3, sleep=no_sleep)
        assert list(outcome.translations) == [f"[PT-PT] texto {i}" for i in range(7)]
        assert outcome.rejects == ()
        assert outcome.requests_issued == 3
        assert [len(c) for c in client.calls] == [3, 3, 1]

    def test_empty_string_short_circuits(self):
        client = ScriptedClient()
        outcome = translate_dataset(["", "ola"], "PT-PT", client, sleep=no_sleep)
        assert outcome.translations == ("", "[PT-PT] ola")
        assert all("" not in call for call in client.calls)

    def test_fake_client_reverses_words(self):
        fake = FakeReversingClient()
        assert fake.translate_batch(["um dois tres"], "PT-BR") == ["tres dois um"]


class TestRetries:
    def test_transient_retries_then_succeeds(self):
        client = ScriptedClient(transient_failures=2)
        sleeps = []
        outcome = translate_dataset(
            ["ola"], "PT-PT", client, max_retries=4, backoff_base=0.5,
            sleep=sleeps.append,
        )
        assert outcome.translations == ("[PT-PT] ola",)
        assert outcome.requests_issued == 3
        assert sleeps == [0.5, 1.0]  # exponential backoff

    def test_transient_exhaustion_rejects_batch(self):
        client = ScriptedClient(transient_failures=99)
        outcome = translate_dataset(
            ["a", "b"], "PT-PT", client, max_retries=2, sleep=no_sleep
        )
        assert outcome.translations == (None, None)
        assert [idx for idx, _ in outcome.rejects] == [0, 1]
        assert outcome.requests_issued == 3  # 1 + 2 retries


class TestBisection:
    def test_permanent_failure_isolated_to_single_example(self):
        client = ScriptedClient(permanent_texts={"veneno"})
        texts = ["um", "dois", "veneno", "tres", "quatro"]
        outcome = translate_dataset(
            texts, "PT-PT", client, batch_size=5, sleep=no_sleep
        )
        assert outcome.translations[0] == "[PT-PT] um"
        assert outcome.translations[2] is None
        assert outcome.translations[4] == "[PT-PT] quatro"
        assert len(outcome.rejects) == 1
        assert outcome.rejects[0][0] == 2

    def test_all_good_examples_survive_multiple_poisons(self):
        client = ScriptedClient(permanent_texts={"p1", "p2"})
        texts = ["a", "p1", "b", "c", "p2", "d", "e", "f"]
        outcome = translate_dataset(
            texts, "PT-PT", client, batch_size=8, sleep=no_sleep
        )
        rejected = {idx for idx, _ in outcome.rejects}
        assert rejected == {1, 4}
        for i, text in enumerate(texts):
            if i in rejected:
                assert outcome.translations[i] is None
            else:
                assert outcome.translations[i] == f"[PT-PT] {text}"


class TestAuth:
    def test_auth_failure_is_fatal(self):
        client = ScriptedClient(auth_fail=True)
        with pytest.raises(AuthenticationError):
            translate_dataset(["ola"], "PT-PT", client, sleep=no_sleep)


class TestCache:
    def test_cache_hit_avoids_request(self, tmp_path):
        cache = TranslationCache(tmp_path / "mt")
        client = ScriptedClient()
        out1 = translate_dataset(["ola", "adeus"], "PT-PT", client, cache=cache, sleep=no_sleep)
        assert out1.requests_issued == 1
        client2 = ScriptedClient()
        out2 = translate_dataset(["ola", "adeus"], "PT-PT", client2, cache=cache, sleep=no_sleep)
        assert out2.requests_issued == 0
        assert out2.translations == out1.translations
        assert client2.calls == []

    def test_cache_is_target_scoped(self, tmp_path):
        cache = TranslationCache(tmp_path / "mt")
        cache.put("ola", "PT-PT", "ola-pt")
        assert cache.get("ola", "PT-PT") == "ola-pt"
        assert cache.get("ola", "PT-BR") is None

    def test_corrupt_cache_entry_is_a_miss(self, tmp_path):
        cache = TranslationCache(tmp_path / "mt")
        cache.put("ola", "PT-PT", "x")
        path = cache._path_for("ola", "PT-PT")
        path.write_text("nao é json", encoding="utf-8")
        assert cache.get("ola", "PT-PT") is None


class TestWorkers:
    def test_parallel_batches_produce_same_result(self):
        texts = [f"texto {i}" for i in range(20)]
        serial = translate_dataset(texts, "PT-PT", ScriptedClient(), batch_size=4, sleep=no_sleep)
        parallel = translate_dataset(
            texts, "PT-PT", ScriptedClient(), batch_size=4, max_workers=4, sleep=no_sleep
        )
        assert serial.translations == parallel.translations
        assert serial.requests_issued == parallel.requests_issued
