/** DOM rendering: topic entry, question + feedback side by side, mastery. */

import type { UiSessionModel, UiState } from "./model";
import type { Question, TurnResult } from "./types";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function difficultyMeter(level: number): HTMLElement {
  const meter = el("div", "difficulty-meter");
  meter.dataset.level = String(level);
  meter.setAttribute("aria-label", `difficulty ${level} of 5`);
  for (let i = 1; i <= 5; i++) {
    meter.appendChild(el("span", i <= level ? "difficulty-dot filled" : "difficulty-dot"));
  }
  return meter;
}

function phaseBadge(phase: string): HTMLElement {
  const badge = el("span", `phase-badge phase-${phase}`, phase);
  return badge;
}

function renderTopicScreen(root: HTMLElement, model: UiSessionModel, state: UiState): void {
  const screen = el("section", "topic-screen");
  screen.appendChild(el("h1", "app-title", "Pick a topic to practice"));

  const form = el("form", "topic-form");
  const input = el("input", "topic-input") as HTMLInputElement;
  input.id = "topic-input";
  input.placeholder = "e.g. photosynthesis";
  input.value = state.topic;
  const start = el("button", "start-button", "Start practicing") as HTMLButtonElement;
  start.id = "start-button";
  start.type = "submit";
  start.disabled = input.value.trim() === "" || state.requestInFlight;
  input.addEventListener("input", () => {
    start.disabled = input.value.trim() === "" || model.getState().requestInFlight;
  });
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void model.startSession(input.value);
  });
  form.append(input, start);
  screen.appendChild(form);

  if (state.inlineError) screen.appendChild(el("p", "inline-error", state.inlineError));
  if (state.banner) {
    const banner = el("div", "error-banner");
    banner.appendChild(el("span", undefined, state.banner));
    const retry = el("button", "retry-button", "Retry") as HTMLButtonElement;
    retry.addEventListener("click", () => void model.startSession(input.value));
    banner.appendChild(retry);
    screen.appendChild(banner);
  }
  root.appendChild(screen);
}

function renderQuestionCard(model: UiSessionModel, state: UiState, question: Question): HTMLElement {
  const card = el("section", "question-card");
  const header = el("div", "card-header");
  header.appendChild(difficultyMeter(question.difficulty));
  header.appendChild(phaseBadge(state.phase));
  if (question.transfer_domain) {
    header.appendChild(el("span", "domain-chip", question.transfer_domain));
  }
  card.appendChild(header);
  card.appendChild(el("p", "question-stem", question.stem));

  if (question.kind === "multiple_choice" && question.options) {
    const list = el("div", "option-list");
    for (const option of question.options) {
      const button = el("button", "option-button") as HTMLButtonElement;
      button.dataset.label = option.label;
      button.textContent = `${option.label}) ${option.text}`;
      button.disabled = state.requestInFlight;
      button.addEventListener("click", () => void model.submitAnswer(option.label));
      list.appendChild(button);
    }
    card.appendChild(list);
  } else {
    const answer = el("textarea", "answer-input") as HTMLTextAreaElement;
    answer.id = "answer-input";
    answer.rows = 4;
    answer.placeholder = "Type your answer";
    answer.value = state.draftAnswer;
    answer.addEventListener("input", () => model.setDraft(answer.value));
    const submit = el("button", "submit-button", "Submit answer") as HTMLButtonElement;
    submit.id = "submit-button";
    submit.disabled = state.requestInFlight;
    submit.addEventListener("click", () => void model.submitAnswer());
    card.append(answer, submit);
  }
  if (state.inlineError) card.appendChild(el("p", "inline-error", state.inlineError));
  return card;
}

function renderFeedbackPanel(lastTurn: TurnResult | null): HTMLElement {
  const panel = el("aside", "feedback-panel");
  panel.appendChild(el("h2", "panel-title", "Feedback"));
  if (!lastTurn) {
    panel.appendChild(el("p", "feedback-placeholder", "Answer the question to get feedback."));
    return panel;
  }
  const { evaluation } = lastTurn;
  panel.appendChild(el("p", "feedback-score", `Score: ${evaluation.score}/10`));
  panel.appendChild(el("p", "feedback-text", evaluation.feedback));
  if (evaluation.hint) {
    panel.appendChild(el("p", "feedback-hint", `Hint: ${evaluation.hint}`));
  }
  return panel;
}

function renderQuestionScreen(root: HTMLElement, model: UiSessionModel, state: UiState): void {
  const screen = el("section", "question-screen");
  const heading = el("div", "session-heading");
  heading.appendChild(el("h1", "app-title", state.topic));
  heading.appendChild(el("span", "turn-count", `turn ${state.turnCount + 1}`));
  screen.appendChild(heading);
  if (state.notice) screen.appendChild(el("p", "notice", state.notice));
  if (state.banner) screen.appendChild(el("div", "error-banner", state.banner));

  // the new question and the previous feedback sit side by side
  const layout = el("div", "two-pane");
  if (state.pendingQuestion) {
    layout.appendChild(renderQuestionCard(model, state, state.pendingQuestion));
  } else {
    const stuck = el("section", "question-card");
    stuck.appendChild(el("p", "question-stem", "No question is pending."));
    const retry = el("button", "retry-button", "Refresh") as HTMLButtonElement;
    retry.addEventListener("click", () => void model.refresh());
    stuck.appendChild(retry);
    layout.appendChild(stuck);
  }
  layout.appendChild(renderFeedbackPanel(state.lastTurn));
  screen.appendChild(layout);
  root.appendChild(screen);
}

function renderMasteredScreen(root: HTMLElement, model: UiSessionModel, state: UiState): void {
  const screen = el("section", "mastery-screen");
  screen.appendChild(el("h1", "app-title", "Mastery achieved"));
  screen.appendChild(
    el(
      "p",
      "mastery-summary",
      `You mastered ${state.topic} in ${state.turnCount} turns, including transfer questions in new domains.`,
    ),
  );
  if (state.lastTurn) {
    screen.appendChild(renderFeedbackPanel(state.lastTurn));
  }
  const transcriptButton = el("button", "transcript-button", "View transcript") as HTMLButtonElement;
  transcriptButton.id = "transcript-button";
  transcriptButton.addEventListener("click", () => void model.loadTranscript());
  screen.appendChild(transcriptButton);

  if (state.transcript) {
    const list = el("ol", "transcript-list");
    for (const turn of state.transcript.turns) {
      const item = el("li", "transcript-turn");
      item.appendChild(el("p", "transcript-question", turn.question.stem));
      item.appendChild(el("p", "transcript-answer", `Your answer: ${turn.student_answer}`));
      item.appendChild(el("p", "transcript-score", `Score: ${turn.evaluation.score}/10`));
      list.appendChild(item);
    }
    screen.appendChild(list);
  }
  root.appendChild(screen);
}

export function render(root: HTMLElement, model: UiSessionModel): void {
  const state = model.getState();
  root.innerHTML = "";
  if (state.screen === "topic") {
    renderTopicScreen(root, model, state);
  } else if (state.screen === "question") {
    renderQuestionScreen(root, model, state);
  } else {
    renderMasteredScreen(root, model, state);
  }
}
