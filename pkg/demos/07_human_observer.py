"""
A human as the threshold detector
=================================

The two beam-splitter outputs land as two spots whose brightness the
observer compares: left brighter, right brighter, or can't tell. The
service below is the same one `macrobell serve` exposes to the browser UI;
here a scripted client with a fixed discrimination gap plays the human.
The observer never sees basis settings or A-side outcomes.
"""

import asyncio

import httpx

from macrobell import theory
from macrobell.config import load_config
from macrobell.service import create_app

GAP = theory.gap_for_success_probability(0.335)  # can't-tell band ~0.865


async def run_session():
    cfg = load_config("human_run.cfg")
    app = create_app(cfg.run, pacing_ms=0)
    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport, base_url="http://svc") as client:
        session = (await client.get("/session")).json()
        sid = session["session_id"]
        print(f"session {sid}: {session['trials_total']} trials, "
              "bases rotate every 250 trials behind the scenes")
        while True:
            trial = (await client.get(f"/session/{sid}/trial")).json()
            if trial.get("complete"):
                break
            left, right = trial["left_brightness"], trial["right_brightness"]
            if left - right > GAP:
                verdict = "LEFT"
            elif right - left > GAP:
                verdict = "RIGHT"
            else:
                verdict = "INCONCLUSIVE"  # reject and wait for the next flash
            await client.post(
                f"/session/{sid}/answer",
                json={"trial_id": trial["trial_id"], "verdict": verdict},
            )
        return (await client.get(f"/session/{sid}/results")).json()


results = asyncio.run(run_session())
print("\ncorrelation terms from the observer's conclusive answers:")
for name, e in results["E"].items():
    print(f"  E({name}) = {e:+.3f} +/- {results['sigma_E'][name]:.3f}")
print(f"\nS = {results['S']:.3f} +/- {results['sigma_S']:.3f}")
print(f"success probability = {results['success_probability']:.3f}")
print("\nthe observer witnesses the entanglement the pair had in the past;")
print("nothing they look at is entangled with anything.")
