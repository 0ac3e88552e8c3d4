/** UI session state machine over the REST client.
 *
 * One request in flight at a time: while a submit or create is pending, any
 * further calls are ignored, so a double-click can never commit two turns.
 * Pending questions pass through `assertRedacted` before they are stored.
 */

import { ApiError, TutorApi } from "./api";
import { assertRedacted } from "./types";
import type { Phase, Question, Transcript, TurnResult } from "./types";

export type Screen = "topic" | "question" | "mastered";

export interface UiState {
  screen: Screen;
  sessionId: string | null;
  topic: string;
  difficulty: number;
  phase: Phase;
  turnCount: number;
  pendingQuestion: Question | null;
  draftAnswer: string;
  lastTurn: TurnResult | null;
  requestInFlight: boolean;
  banner: string | null;
  notice: string | null;
  inlineError: string | null;
  transcript: Transcript | null;
}

function initialState(): UiState {
  return {
    screen: "topic",
    sessionId: null,
    topic: "",
    difficulty: 1,
    phase: "practicing",
    turnCount: 0,
    pendingQuestion: null,
    draftAnswer: "",
    lastTurn: null,
    requestInFlight: false,
    banner: null,
    notice: null,
    inlineError: null,
    transcript: null,
  };
}

function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    return `Server error (${error.status}): ${error.message}`;
  }
  return error instanceof Error ? error.message : String(error);
}

type Listener = (state: UiState) => void;

export class UiSessionModel {
  private state: UiState = initialState();
  private listeners: Listener[] = [];

  constructor(private readonly api: TutorApi) {}

  getState(): UiState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private update(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  /** Stores the draft without re-rendering (the input already shows it). */
  setDraft(text: string): void {
    this.state = { ...this.state, draftAnswer: text };
  }

  async startSession(topic: string): Promise<void> {
    if (this.state.requestInFlight) return;
    const trimmed = topic.trim();
    if (!trimmed) {
      this.update({ inlineError: "Enter a topic to practice." });
      return;
    }
    this.update({ requestInFlight: true, banner: null, notice: null, inlineError: null });
    try {
      const view = await this.api.createSession(trimmed);
      assertRedacted(view.pending_question);
      this.update({
        requestInFlight: false,
        screen: "question",
        sessionId: view.session_id,
        topic: view.topic,
        difficulty: view.difficulty,
        phase: view.phase,
        turnCount: view.turn_count,
        pendingQuestion: view.pending_question,
        lastTurn: null,
        draftAnswer: "",
      });
    } catch (error) {
      // stay on the topic screen, state otherwise unchanged
      this.update({ requestInFlight: false, banner: describeError(error) });
    }
  }

  async submitAnswer(answer?: string): Promise<void> {
    if (this.state.requestInFlight) return;
    const { sessionId, pendingQuestion } = this.state;
    if (!sessionId || !pendingQuestion) return;
    const text = (answer ?? this.state.draftAnswer).trim();
    if (!text) {
      this.update({ inlineError: "An answer is required." });
      return;
    }
    this.update({ requestInFlight: true, banner: null, notice: null, inlineError: null });
    try {
      const result = await this.api.submitAnswer(sessionId, text);
      assertRedacted(result.next_question);
      this.update({
        requestInFlight: false,
        lastTurn: result,
        draftAnswer: "",
        difficulty: result.difficulty_after,
        phase: result.phase_after,
        turnCount: this.state.turnCount + 1,
        pendingQuestion: result.next_question,
        screen: result.mastered ? "mastered" : "question",
      });
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        await this.refresh("That answer was already submitted; the session was refreshed.");
        return;
      }
      if (error instanceof ApiError && error.status === 422) {
        this.update({ requestInFlight: false, inlineError: error.message });
        return;
      }
      this.update({ requestInFlight: false, banner: describeError(error) });
    }
  }

  async refresh(notice?: string): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    try {
      const view = await this.api.getSession(sessionId);
      assertRedacted(view.pending_question);
      this.update({
        requestInFlight: false,
        notice: notice ?? null,
        difficulty: view.difficulty,
        phase: view.phase,
        turnCount: view.turn_count,
        pendingQuestion: view.pending_question,
        screen: view.phase === "mastered" ? "mastered" : "question",
      });
    } catch (error) {
      this.update({ requestInFlight: false, banner: describeError(error) });
    }
  }

  async loadTranscript(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) return;
    try {
      const transcript = await this.api.getTranscript(sessionId);
      this.update({ transcript });
    } catch (error) {
      this.update({ banner: describeError(error) });
    }
  }
}
