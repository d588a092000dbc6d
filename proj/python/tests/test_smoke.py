import math

import pytest

import mixreason as mr


@pytest.fixture(scope="module")
def kb():
    return mr.KnowledgeBase.synthetic(heads=8, tails_min=2, tails_max=3, seed=5)


@pytest.fixture(scope="module")
def model(kb):
    m = mr.Model(kb, latents=3, embed_dim=8, hidden_dim=8, seed=1)
    m.train(kb, epochs=2, seed=1)
    return m


def test_knowledge_base_round_trip(kb):
    again = mr.KnowledgeBase.from_tsv(kb.to_tsv())
    assert again.triples() == kb.triples()
    assert len(kb) == len(kb.triples())
    train, dev, test = kb.split(seed=7)
    assert len(train) + len(dev) + len(test) == len(kb)


def test_training_reports_epochs(kb):
    m = mr.Model(kb, latents=3, embed_dim=8, hidden_dim=8, seed=2)
    hist = m.train(kb, epochs=3, seed=2)
    assert [e["epoch"] for e in hist] == [0, 1, 2]
    assert all(e["loss"] > 0 for e in hist)


def test_infeasible_latents_raise(kb):
    m = mr.Model(kb, latents=1, embed_dim=4, hidden_dim=4)
    with pytest.raises(mr.InfeasibleK):
        m.train(kb, epochs=1)


def test_generate_sorted(model):
    out = model.generate("PersonX eats food", "xWant", beam=3)
    lps = [g["log_prob"] for g in out]
    assert lps == sorted(lps, reverse=True)
    assert len(model.generate("PersonX eats food", "xWant", latents=1, beam=1)) == 1


def test_mixture_is_component_average(model):
    comps = [math.exp(model.log_prob("PersonX eats food", "xNeed", k, "to rest")) for k in range(model.latents)]
    mix = math.exp(model.mixture_log_prob("PersonX eats food", "xNeed", "to rest"))
    assert mix == pytest.approx(sum(comps) / len(comps), abs=1e-12)


def test_reason_and_answer(model):
    paths = model.reason("PersonX eats food", "xWant", hops=1, beam=2, top_paths=3)
    assert 0 < len(paths) <= 3
    assert all(len(p["events"]) == 2 for p in paths)
    d = model.answer("PersonX eats food", "What will PersonX want to do next?", ["to rest", "to swim", "is happy"])
    assert d["relation"] == "xWant" and d["exact_relation"]
    assert 0 <= d["chosen"] < 3 and len(d["scores"]) == 3


def test_checkpoint_round_trip(model, tmp_path):
    model.round_to_storage_precision()
    path = str(tmp_path / "m.ckpt")
    model.save(path)
    assert mr.Model.load(path).to_bytes() == model.to_bytes()


def test_metrics_and_assignment():
    assert mr.div_ngram(["a b c d"] * 3) == 0.0
    assert mr.div_ngram(["a b", "c d"]) == 1.0
    assert mr.bleu("a b c d", "a b c d") == pytest.approx(1.0)
    assert mr.constrained_assign([[-1.0, -2.0], [-1.5, -3.0]]) == [0, 1]
    assert mr.hard_assign([[-1.0, -2.0], [-1.5, -3.0]]) == [0, 0]


def test_question_mapping():
    assert mr.map_question("How would Alex feel afterwards?", agent="Alex") == ("xReact", True)
    assert len(mr.RELATIONS) == 9


def test_synth_qa(kb):
    qs = mr.synth_qa(kb, answers=3, seed=1)
    assert qs and all(len(q["answers"]) == 3 and 0 <= q["gold"] < 3 for q in qs)
