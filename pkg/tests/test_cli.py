import json
import socket
import threading
import time

import pytest
from fastapi.testclient import TestClient

from secrel.bootstrap import BootstrapConfig, run_pipeline
from secrel.cli import main
from secrel.corpus import load_corpus
from secrel.entity import load_gazetteer_dir
from secrel.oracle import Oracle, OracleQueue, OracleQuery
from secrel.patterns import SeedSet, load_relations, load_seeds
from secrel.service import StateSnapshot, create_app


class TestTagCommand:
    def test_tag_two_hop(self, two_hop_paths, tmp_path):
        out = tmp_path / "mentions.json"
        code = main(
            [
                "tag",
                "--corpus", str(two_hop_paths["corpus"]),
                "--gazetteers", str(two_hop_paths["gazetteers"]),
                "--out", str(out),
            ]
        )
        assert code == 0
        payload = json.loads(out.read_text("utf-8"))
        assert set(payload) == {"doc1", "doc2"}
        types = {m["type"] for m in payload["doc1"]}
        assert types == {"SW_Vendor", "SW_Product"}
        assert all(m["provenance"] == "gazetteer" for m in payload["doc1"])

    def test_empty_corpus(self, two_hop_paths, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        out = tmp_path / "mentions.json"
        code = main(
            [
                "tag",
                "--corpus", str(empty),
                "--gazetteers", str(two_hop_paths["gazetteers"]),
                "--out", str(out),
            ]
        )
        assert code == 0
        assert json.loads(out.read_text("utf-8")) == {}

    def test_mixed_format_corpus(self, two_hop_paths, tmp_path):
        import shutil

        from conftest import ANNOTATED_DOC

        corpus = tmp_path / "corpus"
        corpus.mkdir()
        shutil.copy(two_hop_paths["corpus"] / "doc1.txt", corpus / "doc1.txt")
        (corpus / "doc0.json").write_text(json.dumps(ANNOTATED_DOC), "utf-8")
        out = tmp_path / "mentions.json"
        code = main(
            [
                "tag",
                "--corpus", str(corpus),
                "--gazetteers", str(two_hop_paths["gazetteers"]),
                "--out", str(out),
            ]
        )
        assert code == 0
        payload = json.loads(out.read_text("utf-8"))
        assert set(payload) == {"annotated-1", "doc1"}

    def test_missing_gazetteer_exit_2(self, two_hop_paths, tmp_path, capsys):
        code = main(
            [
                "tag",
                "--corpus", str(two_hop_paths["corpus"]),
                "--gazetteers", str(tmp_path),
                "--out", str(tmp_path / "out.json"),
            ]
        )
        assert code == 2
        assert "SW_Vendor" in capsys.readouterr().err


class TestBootstrapCommand:
    def _run(self, two_hop_paths, out_dir, extra=()):
        return main(
            [
                "bootstrap",
                "--corpus", str(two_hop_paths["corpus"]),
                "--seeds", str(two_hop_paths["seeds"]),
                "--gazetteers", str(two_hop_paths["gazetteers"]),
                "--out", str(out_dir),
                *extra,
            ]
        )

    def test_two_hop_auto(self, two_hop_paths, tmp_path):
        out = tmp_path / "run"
        assert self._run(two_hop_paths, out, ("--oracle", "auto")) == 0
        extracted = load_relations(out / "extracted.json")
        keys = {inst.key for inst in extracted}
        assert "rel:is_vendor_of:adobe:acrobat" in keys
        assert (out / "state_is_vendor_of.json").exists()
        assert (out / "run.json").exists()

    def test_rerun_byte_identical(self, two_hop_paths, tmp_path):
        out1, out2 = tmp_path / "run1", tmp_path / "run2"
        assert self._run(two_hop_paths, out1, ("--oracle", "auto")) == 0
        assert self._run(two_hop_paths, out2, ("--oracle", "auto")) == 0
        for name in ("extracted.json", "state_is_vendor_of.json", "run.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_scripted_all_no_keeps_seeds_only(self, two_hop_paths, tmp_path):
        answers = tmp_path / "answers.json"
        # reject every learnable candidate for this fixture
        docs = load_corpus(two_hop_paths["corpus"], "plain-text")
        gazetteers = load_gazetteer_dir(two_hop_paths["gazetteers"])
        seeds = load_seeds(two_hop_paths["seeds"])
        probe = run_pipeline(
            docs, gazetteers,
            {k: SeedSet(v.relation, v.patterns, v.instances) for k, v in seeds.items()},
            BootstrapConfig(),
        )
        learnable = {
            key: "no"
            for key, inst in probe.states["is_vendor_of"].known_relations.items()
            if inst.provenance != "seed"
        }
        answers.write_text(json.dumps(learnable), "utf-8")
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"query_fraction": 1.0}), "utf-8")
        out = tmp_path / "run"
        code = self._run(
            two_hop_paths, out,
            ("--oracle", f"scripted:{answers}", "--config", str(config)),
        )
        assert code == 0
        extracted = load_relations(out / "extracted.json")
        assert {inst.key for inst in extracted} == {
            "rel:is_vendor_of:microsoft:internet explorer"
        }

    def test_relevance_model_flag(self, two_hop_paths, tmp_path):
        from secrel.relevance import RelevanceModel, save_model

        model_path = tmp_path / "model.json"
        save_model(RelevanceModel((0.0,) * 7, -50.0), model_path)  # drops everything
        out = tmp_path / "run"
        code = self._run(
            two_hop_paths, out, ("--oracle", "auto", "--relevance-model", str(model_path))
        )
        assert code == 0
        run_info = json.loads((out / "run.json").read_text("utf-8"))
        assert run_info["kept_documents"] == []
        assert sorted(run_info["dropped_documents"]) == ["doc1", "doc2"]
        extracted = load_relations(out / "extracted.json")
        assert {i.key for i in extracted} == {"rel:is_vendor_of:microsoft:internet explorer"}

    def test_invalid_config_fraction_exit_2(self, two_hop_paths, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"accept_fraction": 2.0}), "utf-8")
        code = self._run(two_hop_paths, tmp_path / "run", ("--config", str(config)))
        assert code == 2
        assert "accept_fraction" in capsys.readouterr().err

    def test_unknown_oracle_mode_exit_2(self, two_hop_paths, tmp_path):
        assert self._run(two_hop_paths, tmp_path / "run", ("--oracle", "psychic")) == 2


class TestEvalCommand:
    def test_eval_prints_table(self, tmp_path, capsys):
        gold = [
            {"relation": "is_vendor_of", "subject": "Adobe", "object": "Acrobat"},
            {"relation": "is_vendor_of", "subject": "Microsoft", "object": "Word"},
        ]
        extracted = gold[:1] + [
            {"relation": "is_vendor_of", "subject": "Oracle", "object": "Excel"}
        ]
        (tmp_path / "gold.json").write_text(json.dumps(gold), "utf-8")
        (tmp_path / "extracted.json").write_text(json.dumps(extracted), "utf-8")
        code = main(
            [
                "eval",
                "--extracted", str(tmp_path / "extracted.json"),
                "--gold", str(tmp_path / "gold.json"),
                "--labeled-docs", str(tmp_path / "gold.json"),
                "--json", str(tmp_path / "report.json"),
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "is_vendor_of" in out and "0.50" in out
        report = json.loads((tmp_path / "report.json").read_text("utf-8"))
        assert report["totals"] == {"tp": 1, "fp": 1, "precision": 0.5}
        assert report["recall"] == {"found": 1, "labeled": 2, "value": 0.5}

    def test_unreadable_file_exit_2(self, tmp_path):
        code = main(
            ["eval", "--extracted", str(tmp_path / "nope.json"), "--gold", str(tmp_path / "nope.json")]
        )
        assert code == 2


class TestServiceEndpoints:
    def _client(self):
        queue = OracleQueue()
        snapshot = StateSnapshot()
        app = create_app(queue, snapshot)
        return queue, snapshot, TestClient(app)

    def test_pending_empty(self):
        _, _, client = self._client()
        response = client.get("/api/queries/pending")
        assert response.status_code == 200 and response.json() == []

    def test_pending_lists_enqueued(self):
        queue, _, client = self._client()
        queue.enqueue(
            [
                OracleQuery(
                    id="q1",
                    kind="relation",
                    relation_name="is_vendor_of",
                    payload={"key": "rel:x", "description": "d"},
                    context=[{"text": "t", "spans": []}],
                )
            ]
        )
        listed = client.get("/api/queries/pending").json()
        assert [q["id"] for q in listed] == ["q1"]
        assert listed[0]["status"] == "pending"

    def test_answer_roundtrip(self):
        queue, _, client = self._client()
        queue.enqueue(
            [OracleQuery(id="q1", kind="pattern", relation_name="symbol_of", payload={"key": "pat:x"})]
        )
        response = client.post("/api/queries/q1/answer", json={"answer": "yes"})
        assert response.status_code == 200
        assert queue.get("q1").answer == "yes"
        assert client.get("/api/queries/pending").json() == []

    def test_unknown_id_404(self):
        _, _, client = self._client()
        assert client.post("/api/queries/ghost/answer", json={"answer": "yes"}).status_code == 404

    def test_already_answered_404(self):
        queue, _, client = self._client()
        queue.enqueue(
            [OracleQuery(id="q1", kind="pattern", relation_name="symbol_of", payload={"key": "k"})]
        )
        queue.answer("q1", "no")
        assert client.post("/api/queries/q1/answer", json={"answer": "yes"}).status_code == 404

    def test_invalid_answer_rejected(self):
        queue, _, client = self._client()
        queue.enqueue(
            [OracleQuery(id="q1", kind="pattern", relation_name="symbol_of", payload={"key": "k"})]
        )
        assert client.post("/api/queries/q1/answer", json={"answer": "maybe"}).status_code == 422

    def test_state_endpoint(self):
        _, snapshot, client = self._client()
        assert client.get("/api/state").json() == {"iteration": 0, "relations": {}}

    def test_ui_placeholder(self):
        _, _, client = self._client()
        response = client.get("/ui")
        assert response.status_code == 200 and "review" in response.text.lower()

    def test_ui_static_assets_when_built(self):
        from pathlib import Path

        dist = Path(__file__).parent.parent / "frontend" / "dist"
        if not (dist / "index.html").exists():
            pytest.skip("frontend not built; run `npm run build` in frontend/")
        queue = OracleQueue()
        client = TestClient(create_app(queue, StateSnapshot(), ui_dir=dist))
        page = client.get("/ui/")
        assert page.status_code == 200 and "Relation review queue" in page.text
        script = client.get("/ui/app.js")
        assert script.status_code == 200 and "startApp" in script.text


class TestServeMode:
    def test_yes_answer_shows_score_1000_in_snapshot(self, two_hop_paths):
        docs = load_corpus(two_hop_paths["corpus"], "plain-text")
        gazetteers = load_gazetteer_dir(two_hop_paths["gazetteers"])
        raw_seeds = load_seeds(two_hop_paths["seeds"])
        seeds = {k: SeedSet(v.relation, v.patterns, v.instances) for k, v in raw_seeds.items()}
        queue = OracleQueue()
        snapshot = StateSnapshot()
        oracle = Oracle(mode="service", queue=queue, timeout=30)
        client = TestClient(create_app(queue, snapshot))
        done = {}

        def engine():
            done["result"] = run_pipeline(
                docs, gazetteers, seeds, BootstrapConfig(), oracle=oracle, snapshot=snapshot
            )

        thread = threading.Thread(target=engine)
        thread.start()
        answered = []
        deadline = time.monotonic() + 30
        while thread.is_alive() and time.monotonic() < deadline:
            for query in client.get("/api/queries/pending").json():
                response = client.post(
                    f"/api/queries/{query['id']}/answer", json={"answer": "yes"}
                )
                if response.status_code == 200:
                    answered.append(query["payload"]["key"])
            time.sleep(0.02)
        thread.join(timeout=30)
        assert not thread.is_alive()
        assert answered, "service mode should have asked at least one query"
        state = client.get("/api/state").json()
        cycle = state["relations"]["is_vendor_of"]["last_cycle"]
        rows = cycle["patterns"] + cycle["relations"]
        overridden = {r["key"]: r for r in rows if r["answer"] == "yes"}
        covered = [k for k in answered if k in overridden]
        assert covered and all(overridden[k]["score"] == 1000.0 for k in covered)
        assert all(overridden[k]["accepted"] for k in covered)

    def test_no_answer_permanently_excludes(self, two_hop_paths):
        docs = load_corpus(two_hop_paths["corpus"], "plain-text")
        gazetteers = load_gazetteer_dir(two_hop_paths["gazetteers"])
        raw_seeds = load_seeds(two_hop_paths["seeds"])
        seeds = {k: SeedSet(v.relation, v.patterns, v.instances) for k, v in raw_seeds.items()}
        queue = OracleQueue()
        snapshot = StateSnapshot()
        oracle = Oracle(mode="service", queue=queue, timeout=30)
        client = TestClient(create_app(queue, snapshot))
        done = {}

        def engine():
            done["result"] = run_pipeline(
                docs, gazetteers, seeds, BootstrapConfig(query_fraction=1.0),
                oracle=oracle, snapshot=snapshot,
            )

        thread = threading.Thread(target=engine)
        thread.start()
        target = "rel:is_vendor_of:adobe:acrobat"
        deadline = time.monotonic() + 30
        while thread.is_alive() and time.monotonic() < deadline:
            for query in client.get("/api/queries/pending").json():
                answer = "no" if query["payload"]["key"] == target else "dont_know"
                client.post(f"/api/queries/{query['id']}/answer", json={"answer": answer})
            time.sleep(0.02)
        thread.join(timeout=30)
        assert not thread.is_alive()
        state = done["result"].states["is_vendor_of"]
        assert state.oracle_decisions.get(target) == "no"
        assert target not in state.known_relations
        assert target not in {inst.key for inst in done["result"].extracted}

    def test_port_in_use_exit_3(self, two_hop_paths, tmp_path, capsys):
        blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        blocker.bind(("127.0.0.1", 0))
        port = blocker.getsockname()[1]
        try:
            code = main(
                [
                    "bootstrap",
                    "--corpus", str(two_hop_paths["corpus"]),
                    "--seeds", str(two_hop_paths["seeds"]),
                    "--gazetteers", str(two_hop_paths["gazetteers"]),
                    "--out", str(tmp_path / "run"),
                    "--oracle", "serve",
                    "--bind", f"127.0.0.1:{port}",
                    "--oracle-timeout", "0",
                ]
            )
        finally:
            blocker.close()
        assert code == 3
