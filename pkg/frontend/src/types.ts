/** Wire types mirroring the session service's JSON payloads. */

export type QuestionKind = "multiple_choice" | "short_answer" | "transfer";
export type Phase = "practicing" | "transferring" | "mastered";

export interface QuestionOption {
  label: string;
  text: string;
}

/** A pending question as served to students: never carries the answer key. */
export interface Question {
  id: string;
  kind: QuestionKind;
  stem: string;
  difficulty: number;
  options: QuestionOption[] | null;
  transfer_domain: string | null;
}

export interface Evaluation {
  score: number;
  feedback: string;
  hint: string | null;
}

export interface SessionView {
  session_id: string;
  topic: string;
  difficulty: number;
  phase: Phase;
  turn_count: number;
  pending_question: Question | null;
}

export interface TurnResult {
  evaluation: Evaluation;
  next_question: Question | null;
  difficulty_after: number;
  phase_after: Phase;
  mastered: boolean;
}

export interface TranscriptTurn {
  question: Question & { correct_label?: string | null; reference_answer?: string | null };
  student_answer: string;
  evaluation: Evaluation;
  timestamp: number;
}

export interface Transcript {
  session_id: string;
  topic: string;
  difficulty: number;
  phase: Phase;
  event_count: number;
  turns: TranscriptTurn[];
  pending_question: Question | null;
}

const FORBIDDEN_PENDING_KEYS = ["correct_label", "reference_answer"] as const;

/**
 * The server must redact pending questions; we rely on that and assert it,
 * so a leaking backend fails loudly instead of the key reaching the DOM.
 */
export function assertRedacted(question: Question | null): void {
  if (!question) return;
  for (const key of FORBIDDEN_PENDING_KEYS) {
    if (key in question) {
      throw new Error(`server leaked ${key} on a pending question`);
    }
  }
}
