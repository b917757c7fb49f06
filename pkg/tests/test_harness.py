import json
import os
import sys
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from mtnoise.augment import ParallelCorpus
from mtnoise.harness import (
    ConstantTranslator,
    HttpTranslator,
    IdentityTranslator,
    SubprocessTranslator,
    TranslatorError,
    TranslatorProtocolError,
    _translate_all,
    evaluate_quality,
    evaluate_robustness,
    paired_bootstrap,
    parse_translator_spec,
    subprocess_translator,
)
from mtnoise.noise import PRODUCTIVE_NOISE_TYPES, NoiseType


# --- basic translators ---------------------------------------------------------


def test_identity_and_constant():
    assert IdentityTranslator().translate(["a", "b"]) == ["a", "b"]
    assert ConstantTranslator("x").translate(["a", "b"]) == ["x", "x"]
    assert IdentityTranslator().translate([]) == []


def test_parse_translator_spec_forms():
    assert parse_translator_spec("identity").name == "identity"
    constant = parse_translator_spec("constant:hello world")
    assert constant.translate(["x"]) == ["hello world"]
    cmd = parse_translator_spec("cmd:cat -u")
    assert cmd.command == ["cat", "-u"]
    http = parse_translator_spec("http://localhost:1/x")
    assert http.endpoint == "http://localhost:1/x"
    http2 = parse_translator_spec("http:https://example.com/mt")
    assert http2.endpoint == "https://example.com/mt"
    with pytest.raises(ValueError):
        parse_translator_spec("carrier-pigeon:coo")


def test_auth_header_parsing():
    t = HttpTranslator("http://x/", auth_header="Authorization: Bearer abc")
    assert t._headers == {"Authorization": "Bearer abc"}
    with pytest.raises(ValueError):
        HttpTranslator("http://x/", auth_header="no-colon-here")


# --- subprocess translator --------------------------------------------------------


def test_subprocess_cat_round_trip():
    t = subprocess_translator("cat")
    try:
        assert t.translate(["viens", "divi trīs", ""]) == ["viens", "divi trīs", ""]
        assert t.translate([]) == []
    finally:
        t.close()


def test_subprocess_python_filter():
    code = "import sys\nfor line in sys.stdin: print(line.rstrip('\\n').upper(), flush=True)"
    t = SubprocessTranslator([sys.executable, "-c", code])
    try:
        assert t.translate(["abc", "zaļa zeme"]) == ["ABC", "ZAĻA ZEME"]
    finally:
        t.close()


def test_subprocess_reuses_process_across_batches():
    code = (
        "import sys, os\n"
        "pid = str(os.getpid())\n"
        "for line in sys.stdin: print(pid, flush=True)"
    )
    t = SubprocessTranslator([sys.executable, "-c", code])
    try:
        first = t.translate(["a"])
        second = t.translate(["b"])
        assert first == second
    finally:
        t.close()


def test_subprocess_sanitizes_embedded_newlines():
    t = subprocess_translator("cat")
    try:
        assert t.translate(["first\nsecond"]) == ["first second"]
    finally:
        t.close()


def test_subprocess_spawn_failure_raises_translator_error():
    t = SubprocessTranslator(["/no/such/binary"])
    with pytest.raises(TranslatorError, match="cannot spawn"):
        t.translate(["x"])


def test_subprocess_crash_exhausts_retries(tmp_path):
    code = "import sys; sys.exit(3)"
    t = SubprocessTranslator([sys.executable, "-c", code])
    with pytest.raises(TranslatorProtocolError, match="retries"):
        t.translate(["x"])
    t.close()


def test_subprocess_recovers_after_transient_crash(tmp_path):
    flag = tmp_path / "started_once"
    code = (
        "import sys, os\n"
        f"flag = {str(flag)!r}\n"
        "if not os.path.exists(flag):\n"
        "    open(flag, 'w').close()\n"
        "    sys.exit(1)\n"
        "for line in sys.stdin: print('ok ' + line.rstrip('\\n'), flush=True)"
    )
    t = SubprocessTranslator([sys.executable, "-c", code])
    try:
        assert t.translate(["x", "y"]) == ["ok x", "ok y"]
    finally:
        t.close()


def test_empty_command_rejected():
    with pytest.raises(ValueError):
        SubprocessTranslator([])


# --- http translator ----------------------------------------------------------------


class _StubHandler(BaseHTTPRequestHandler):
    server_version = "stub"

    def log_message(self, *args):
        pass

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length))
        texts = payload["texts"]
        state = self.server.state
        state["requests"].append(
            {"n": len(texts), "auth": self.headers.get("Authorization")}
        )
        route = self.path
        if route == "/flaky" and state["flaky_failures"] > 0:
            state["flaky_failures"] -= 1
            self.send_response(503)
            self.end_headers()
            return
        if route == "/always500":
            self.send_response(500)
            self.end_headers()
            return
        if route == "/teapot":
            self.send_response(418)
            self.end_headers()
            return
        if route == "/malformed":
            body = json.dumps({"nope": []}).encode()
        elif route == "/short":
            body = json.dumps({"translations": ["only one"]}).encode()
        else:
            body = json.dumps(
                {"translations": [f"tulkots: {t}" for t in texts]}
            ).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


@pytest.fixture()
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    server.state = {"requests": [], "flaky_failures": 2}
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server
    finally:
        server.shutdown()
        thread.join(timeout=5)


def _url(server, path):
    return f"http://127.0.0.1:{server.server_address[1]}{path}"


def test_http_round_trip(stub_server):
    t = HttpTranslator(_url(stub_server, "/ok"))
    assert t.translate(["viens", "divi"]) == ["tulkots: viens", "tulkots: divi"]


def test_http_batches_capped_at_limit(stub_server):
    t = HttpTranslator(_url(stub_server, "/ok"))
    out = t.translate([f"s{i}" for i in range(130)])
    assert len(out) == 130
    sizes = [r["n"] for r in stub_server.state["requests"]]
    assert sizes == [64, 64, 2]


def test_http_sends_auth_header(stub_server):
    t = HttpTranslator(_url(stub_server, "/ok"), auth_header="Authorization: Bearer tok")
    t.translate(["x"])
    assert stub_server.state["requests"][-1]["auth"] == "Bearer tok"


def test_http_retries_5xx_then_succeeds(stub_server, monkeypatch):
    monkeypatch.setattr("mtnoise.harness.time.sleep", lambda s: None)
    t = HttpTranslator(_url(stub_server, "/flaky"))
    assert t.translate(["x"]) == ["tulkots: x"]
    assert len(stub_server.state["requests"]) == 3  # two 503s, then success


def test_http_persistent_5xx_raises_after_retries(stub_server, monkeypatch):
    monkeypatch.setattr("mtnoise.harness.time.sleep", lambda s: None)
    t = HttpTranslator(_url(stub_server, "/always500"))
    with pytest.raises(TranslatorError, match="500 after retries"):
        t.translate(["x"])
    assert len(stub_server.state["requests"]) == 3


def test_http_4xx_fails_immediately(stub_server):
    t = HttpTranslator(_url(stub_server, "/teapot"))
    with pytest.raises(TranslatorError, match="418"):
        t.translate(["x"])
    assert len(stub_server.state["requests"]) == 1


def test_http_malformed_response_no_retry(stub_server):
    t = HttpTranslator(_url(stub_server, "/malformed"))
    with pytest.raises(TranslatorProtocolError, match="malformed"):
        t.translate(["x"])
    assert len(stub_server.state["requests"]) == 1


def test_http_wrong_count_is_protocol_error(stub_server):
    t = HttpTranslator(_url(stub_server, "/short"))
    with pytest.raises(TranslatorProtocolError):
        t.translate(["a", "b", "c"])


def test_http_connection_refused_is_translator_error():
    t = HttpTranslator("http://127.0.0.1:9/unreachable")
    with pytest.raises(TranslatorError, match="request failed"):
        t.translate(["x"])


# --- batching helper -----------------------------------------------------------------


class _RecordingTranslator:
    name = "recording"

    def __init__(self):
        self.batches = []

    def translate(self, batch):
        self.batches.append(len(batch))
        return list(batch)


def test_translate_all_batches_and_preserves_order():
    t = _RecordingTranslator()
    lines = [f"line {i}" for i in range(25)]
    assert _translate_all(t, lines, batch_size=10) == lines
    assert t.batches == [10, 10, 5]


def test_translate_all_rejects_wrong_count():
    class Short:
        name = "short"

        def translate(self, batch):
            return batch[:-1]

    with pytest.raises(TranslatorProtocolError, match="batch starting at sentence 0"):
        _translate_all(Short(), ["a", "b"], batch_size=64)


# --- robustness -----------------------------------------------------------------------


def test_robustness_constant_translator_scores_zero(fixture_sources, lv, fixture_lexicon):
    report = evaluate_robustness(
        ConstantTranslator("nemainīga izeja katrai ievadei"),
        fixture_sources[:8],
        PRODUCTIVE_NOISE_TYPES,
        lv,
        fixture_lexicon,
        variants_per_sentence=4,
        seed=11,
    )
    assert report.overall == 0.0
    assert all(t.mean_10nt_ter == 0.0 for t in report.per_type)
    assert report.total_sentences == 8
    assert report.translator == "constant"
    assert report.profile_tag == "lv"
    assert report.timestamp is None


def test_robustness_identity_translator_nonzero(fixture_sources, lv, fixture_lexicon):
    report = evaluate_robustness(
        IdentityTranslator(), fixture_sources[:8], PRODUCTIVE_NOISE_TYPES, lv,
        fixture_lexicon, variants_per_sentence=4, seed=11,
    )
    assert report.overall > 0.0
    assert report.per_type[0].sentences == 8
    assert report.per_type[0].noops == 0


def test_robustness_deterministic_and_jobs_invariant(fixture_sources, lv, fixture_lexicon):
    kwargs = dict(
        test_sentences=fixture_sources[:6],
        noise_types=(NoiseType.LATINIZE, NoiseType.PERMUTE_LETTERS),
        profile=lv,
        lexicon=fixture_lexicon,
        variants_per_sentence=3,
        seed=5,
    )
    a = evaluate_robustness(IdentityTranslator(), **kwargs)
    b = evaluate_robustness(IdentityTranslator(), **kwargs)
    c = evaluate_robustness(IdentityTranslator(), jobs=4, **kwargs)
    assert a == b == c


def test_robustness_counts_noops_and_skips_them(lv):
    # ascii-only sentences: latinize can never fire
    sentences = ["nav diakritiku te", "tikai ascii teksts"]
    report = evaluate_robustness(
        IdentityTranslator(), sentences, (NoiseType.LATINIZE,), lv,
        variants_per_sentence=5, seed=0,
    )
    t = report.per_type[0]
    assert t.noops == 10 and t.sentences == 0 and t.mean_10nt_ter == 0.0
    assert report.overall == 0.0


def test_robustness_rejects_empty_translations(fixture_sources, lv):
    report_error = None
    with pytest.raises(TranslatorProtocolError, match="empty translation"):
        evaluate_robustness(
            ConstantTranslator("   "), fixture_sources[:2],
            (NoiseType.LATINIZE,), lv, variants_per_sentence=2,
        )


def test_robustness_argument_validation(lv):
    with pytest.raises(ValueError):
        evaluate_robustness(IdentityTranslator(), [], (NoiseType.LATINIZE,), lv)
    with pytest.raises(ValueError):
        evaluate_robustness(IdentityTranslator(), ["a."], (), lv)
    with pytest.raises(ValueError):
        evaluate_robustness(
            IdentityTranslator(), ["a."], (NoiseType.LATINIZE,), lv,
            variants_per_sentence=0,
        )


def test_robustness_variant_seeds_match_documented_scheme(fixture_sources, lv):
    """Variant j of sentence i under type t uses mix(seed, i, t.code, j)."""
    from mtnoise.noise import apply_noise
    from mtnoise.rng import mix
    from mtnoise.text import tokenize

    class Recorder:
        name = "recorder"

        def __init__(self):
            self.seen = []

        def translate(self, batch):
            self.seen.extend(batch)
            return list(batch)

    recorder = Recorder()
    sentences = fixture_sources[:2]
    seed = 99
    evaluate_robustness(
        recorder, sentences, (NoiseType.PERMUTE_LETTERS,), lv,
        variants_per_sentence=2, seed=seed,
    )
    expected = []
    for i, line in enumerate(sentences):
        for j in range(2):
            expected.append(
                apply_noise(
                    tokenize(line, lv), NoiseType.PERMUTE_LETTERS, lv,
                    seed=mix(seed, i, NoiseType.PERMUTE_LETTERS.code, j),
                ).noised_text
            )
    assert recorder.seen[len(sentences):] == expected


# --- quality ------------------------------------------------------------------------


def test_quality_clean_first_then_types(fixture_corpus, lv, fixture_lexicon):
    report = evaluate_quality(
        IdentityTranslator(), fixture_corpus, (NoiseType.LATINIZE,), lv,
        fixture_lexicon, seed=1,
    )
    assert [name for name, _ in report.conditions] == ["clean", "latinize"]
    assert report.sentences == len(fixture_corpus)


def test_quality_identity_on_self_corpus_is_perfect(lv, fixture_sources):
    corpus = ParallelCorpus(tuple(fixture_sources), tuple(fixture_sources))
    report = evaluate_quality(
        IdentityTranslator(), corpus, (NoiseType.LATINIZE,), lv, seed=1,
    )
    conditions = dict(report.conditions)
    assert conditions["clean"].score == 1.0
    assert conditions["latinize"].score < 1.0  # noised input no longer matches


def test_quality_rejects_empty_corpus(lv):
    with pytest.raises(ValueError):
        evaluate_quality(IdentityTranslator(), ParallelCorpus((), ()), (), lv)


# --- paired bootstrap -----------------------------------------------------------------


def test_bootstrap_self_comparison_not_significant(lv):
    hyps = [f"viens divi trīs četri {i}" for i in range(30)]
    result = paired_bootstrap(hyps, hyps, hyps, lv, iterations=200, seed=1)
    assert result.p_value == 1.0
    assert not result.significant
    assert result.score_a == result.score_b


def test_bootstrap_detects_dominant_system(lv):
    refs = [f"šis ir teikums numur {i} ar vārdiem" for i in range(60)]
    hyps_a = list(refs)
    hyps_b = ["pavisam cits saturs te iekšā"] * 60
    result = paired_bootstrap(hyps_a, hyps_b, refs, lv, iterations=200, seed=1)
    assert result.p_value < 0.05
    assert result.significant
    assert result.score_a == 1.0
    assert result.score_b == 0.0


def test_bootstrap_deterministic(lv):
    refs = [f"teikums numur {i} šeit" for i in range(20)]
    hyps_b = list(refs)
    hyps_b[0] = "cits teksts pavisam šeit"
    r1 = paired_bootstrap(refs, hyps_b, refs, lv, iterations=150, seed=7)
    r2 = paired_bootstrap(refs, hyps_b, refs, lv, iterations=150, seed=7)
    assert r1 == r2


def test_bootstrap_argument_validation(lv):
    with pytest.raises(ValueError):
        paired_bootstrap(["a"], ["a", "b"], ["a"], lv)
    with pytest.raises(ValueError):
        paired_bootstrap([], [], [], lv)
    with pytest.raises(ValueError):
        paired_bootstrap(["a"], ["a"], ["a"], lv, iterations=50)
