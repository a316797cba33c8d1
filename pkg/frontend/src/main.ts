import { ObserverApi } from "./api.js";
import { DomView } from "./render.js";
import { ObserverSession } from "./session.js";

const api = new ObserverApi("");
const view = new DomView(document);
const session = new ObserverSession(api, view);

document.getElementById("answer-left")!.addEventListener("click", () => {
  void session.answer("LEFT");
});
document.getElementById("answer-right")!.addEventListener("click", () => {
  void session.answer("RIGHT");
});
document.getElementById("answer-none")!.addEventListener("click", () => {
  void session.answer("INCONCLUSIVE");
});
document.getElementById("retry")!.addEventListener("click", () => {
  void session.retry();
});

// keyboard: left/right arrows answer, space rejects
document.addEventListener("keydown", (event) => {
  if (event.key === "ArrowLeft") void session.answer("LEFT");
  else if (event.key === "ArrowRight") void session.answer("RIGHT");
  else if (event.key === " ") {
    event.preventDefault();
    void session.answer("INCONCLUSIVE");
  }
});

void session.start();
