"""Local HTTP service driving the human-observer mode.

The browser (or any scripted client) plays the threshold detector: it sees
two spot brightnesses per trial and answers LEFT, RIGHT or INCONCLUSIVE.
The left spot is the '+' analyzer output.  The payload sent to the client is
a deterministic function of (seed, trial_id) and never contains basis
settings, A-side outcomes, or the hidden pulse angle, so the observer cannot
know which correlation term a trial contributes to.

Endpoints
---------
GET  /session                 -> {"session_id", "trials_total", "pacing_ms"}
GET  /session/{id}/trial      -> {"trial_id", "left_brightness", "right_brightness"}
                                 or {"complete": true} after the last answer
POST /session/{id}/answer     -> {"status": "accepted"|"duplicate", ...}
                                 body {"trial_id", "verdict": "LEFT"|"RIGHT"|"INCONCLUSIVE"}
GET  /session/{id}/results    -> running Bell estimate, final after the last trial
"""

from __future__ import annotations

import threading
from dataclasses import replace
from pathlib import Path
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.responses import RedirectResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .analysis import InsufficientDataError, correlation_term
from .experiment import (
    CHSH_SETTING_NAMES,
    RunConfig,
    TrialLog,
    accumulate_tables,
    simulate_flashes,
)

__all__ = ["create_app", "ObserverSession"]

VERDICT_FROM_ANSWER = {"LEFT": 1, "RIGHT": -1, "INCONCLUSIVE": 0}


class AnswerBody(BaseModel):
    trial_id: int
    verdict: str


class ObserverSession:
    """One observer's run: a pregenerated flash stream plus their answers."""

    def __init__(self, session_id: str, cfg: RunConfig):
        self.session_id = session_id
        self.cfg = cfg
        self.stream: TrialLog = simulate_flashes(cfg)
        self.verdicts = np.zeros(len(self.stream), dtype=np.int8)
        self.next_trial = 0
        self.last_answer: Optional[dict] = None

    @property
    def total(self) -> int:
        return len(self.stream)

    @property
    def complete(self) -> bool:
        return self.next_trial >= self.total

    def pending_trial(self) -> dict:
        if self.complete:
            return {"complete": True}
        i = self.next_trial
        return {
            "trial_id": i,
            "left_brightness": float(np.clip(self.stream.i_plus[i], 0.0, 1.0)),
            "right_brightness": float(np.clip(self.stream.i_minus[i], 0.0, 1.0)),
        }

    def answer(self, trial_id: int, verdict_label: str) -> dict:
        if verdict_label not in VERDICT_FROM_ANSWER:
            raise HTTPException(
                status_code=422, detail=f"unknown verdict {verdict_label!r}"
            )
        if self.last_answer is not None and trial_id == self.last_answer["trial_id"]:
            return {"status": "duplicate", **self._progress()}
        if self.complete or trial_id != self.next_trial:
            raise HTTPException(
                status_code=409,
                detail=f"stale trial: answer for {trial_id}, pending "
                f"{'none' if self.complete else self.next_trial}",
            )
        self.verdicts[trial_id] = VERDICT_FROM_ANSWER[verdict_label]
        self.last_answer = {"trial_id": trial_id, "verdict": verdict_label}
        self.next_trial += 1
        return {"status": "accepted", **self._progress()}

    def _progress(self) -> dict:
        answered = self.next_trial
        conclusive = int(np.sum(self.verdicts[:answered] != 0))
        return {"answered": answered, "conclusive": conclusive, "total": self.total}

    def results(self) -> dict:
        answered = self.next_trial
        log = self.stream.with_verdicts(self.verdicts)
        if answered < self.total:
            log = TrialLog(
                log.settings,
                log.setting_index[:answered],
                log.hidden_theta[:answered],
                log.a_click[:answered],
                log.i_plus[:answered],
                log.i_minus[:answered],
                log.verdict[:answered],
                log.pairs_attempted,
            )
        tables = accumulate_tables(log) if answered else {}
        e_terms: dict[str, Optional[float]] = {}
        sigma_e: dict[str, Optional[float]] = {}
        for name in CHSH_SETTING_NAMES:
            try:
                e, sigma = correlation_term(tables[name])
                e_terms[name], sigma_e[name] = e, sigma
            except (KeyError, InsufficientDataError):
                e_terms[name] = sigma_e[name] = None
        s = sigma_s = None
        if all(v is not None for v in e_terms.values()):
            s = abs(
                e_terms["a1b1"] - e_terms["a1b2"] + e_terms["a2b1"] + e_terms["a2b2"]
            )
            sigma_s = float(np.sqrt(sum(v**2 for v in sigma_e.values())))
        progress = self._progress()
        return {
            "E": e_terms,
            "sigma_E": sigma_e,
            "S": s,
            "sigma_S": sigma_s,
            "success_probability": (
                progress["conclusive"] / answered if answered else None
            ),
            "complete": self.complete,
            **progress,
        }


def create_app(
    cfg: RunConfig, pacing_ms: int = 200, static_dir: Optional[Path] = None
) -> FastAPI:
    """Build the service around a run config; each new session gets an
    independent seed-derived stream (session 0 uses the config seed itself,
    so it reproduces the headless run exactly)."""
    app = FastAPI(title="macrobell observer service")
    sessions: dict[str, ObserverSession] = {}
    lock = threading.Lock()
    counter = {"next": 0}

    def get_session(session_id: str) -> ObserverSession:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")
        return session

    @app.get("/session")
    def new_session() -> dict:
        with lock:
            index = counter["next"]
            counter["next"] += 1
            if index == 0:
                session_cfg = cfg
            else:
                derived = int(
                    np.random.SeedSequence(
                        cfg.seed, spawn_key=(800, index)
                    ).generate_state(1, np.uint64)[0]
                )
                session_cfg = replace(cfg, seed=derived)
            session = ObserverSession(f"s{index}", session_cfg)
            sessions[session.session_id] = session
        return {
            "session_id": session.session_id,
            "trials_total": session.total,
            "pacing_ms": pacing_ms,
        }

    @app.get("/session/{session_id}/trial")
    def get_trial(session_id: str) -> dict:
        return get_session(session_id).pending_trial()

    @app.post("/session/{session_id}/answer")
    def post_answer(session_id: str, body: AnswerBody) -> dict:
        with lock:
            return get_session(session_id).answer(body.trial_id, body.verdict)

    @app.get("/session/{session_id}/results")
    def get_results(session_id: str) -> dict:
        return get_session(session_id).results()

    if static_dir is not None and static_dir.is_dir():
        @app.get("/", include_in_schema=False)
        def root() -> RedirectResponse:
            return RedirectResponse("/ui/")

        app.mount("/ui", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
