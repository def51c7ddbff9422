// Session controller: a small state machine over the service API.
//
// All user-visible state derives from service responses; the only thing
// kept on the client is the session token (rater id). The rating phase is
// reachable only after instruction confirmation, mutations run one at a
// time, and a rated pair can never be submitted again.

import { ApiError, Instructions, PairPresentation, RatingApi } from './api';

export type Phase = 'register' | 'instructions' | 'examples' | 'rating' | 'done';
export type Language = 'en' | 'de';

export interface TokenStorage {
  load(): string | null;
  save(token: string): void;
  clear(): void;
}

export const RATER_TOKEN_KEY = 'rater_token';

export function browserTokenStorage(storage: Storage): TokenStorage {
  return {
    load: () => storage.getItem(RATER_TOKEN_KEY),
    save: (token) => storage.setItem(RATER_TOKEN_KEY, token),
    clear: () => storage.removeItem(RATER_TOKEN_KEY),
  };
}

export interface SessionState {
  phase: Phase;
  language: Language;
  raterId: string | null;
  instructions: Instructions | null;
  current: PairPresentation | null;
  selection: number | null;
  progress: { rated: number; total: number };
  busy: boolean;
  error: string | null;
}

type Listener = (state: SessionState) => void;

export class SessionController {
  private state: SessionState = {
    phase: 'register',
    language: 'en',
    raterId: null,
    instructions: null,
    current: null,
    selection: null,
    progress: { rated: 0, total: 0 },
    busy: false,
    error: null,
  };
  private rated = new Set<string>();
  private listeners: Listener[] = [];

  constructor(
    private readonly api: RatingApi,
    private readonly storage: TokenStorage,
  ) {}

  get snapshot(): Readonly<SessionState> {
    return this.state;
  }

  setLanguage(language: Language): void {
    if (language !== this.state.language) {
      this.update({ language });
      if (this.state.instructions) void this.loadInstructions(language);
    }
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private update(patch: Partial<SessionState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  /** Resume a stored session or land on the registration screen. */
  async start(): Promise<void> {
    const token = this.storage.load();
    if (!token) {
      this.update({ phase: 'register' });
      return;
    }
    try {
      const progress = await this.api.progress(token);
      this.update({
        raterId: token,
        progress: { rated: progress.rated, total: progress.total },
      });
      if (!progress.confirmed) {
        await this.loadInstructions(this.state.language);
        return;
      }
      await this.advance();
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        // the service no longer knows this rater: start over
        this.storage.clear();
        this.update({ phase: 'register', raterId: null });
        return;
      }
      this.update({ error: describe(err) });
    }
  }

  async register(code: string): Promise<void> {
    if (this.state.busy) return;
    this.update({ busy: true, error: null });
    try {
      const result = await this.api.register(code);
      this.storage.save(result.rater_id);
      this.update({
        raterId: result.rater_id,
        progress: { rated: 0, total: result.total_items },
        busy: false,
      });
      await this.loadInstructions(this.state.language);
    } catch (err) {
      this.update({ busy: false, error: describe(err) });
    }
  }

  /** Fetch (or re-fetch after a failure) the instruction flow. */
  async loadInstructions(language: Language): Promise<void> {
    this.update({ language, error: null });
    try {
      const instructions = await this.api.instructions(language);
      const scale = instructions.parts.find((part) => part.id === 'scale');
      if (!scale || !scale.points || scale.points.length !== 5) {
        throw new ApiError('bad_scale', 'the rating scale must have exactly 5 points', 0);
      }
      this.update({ instructions, phase: 'instructions' });
    } catch (err) {
      // retry view: stay where we are, expose the failure
      this.update({ instructions: null, phase: 'instructions', error: describe(err) });
    }
  }

  showExamples(): void {
    if (this.state.instructions) this.update({ phase: 'examples' });
  }

  backToInstructions(): void {
    if (this.state.phase === 'examples') this.update({ phase: 'instructions' });
  }

  /** Confirmation gates the rating phase. */
  async confirmInstructions(): Promise<void> {
    if (this.state.busy || !this.state.raterId || !this.state.instructions) return;
    this.update({ busy: true, error: null });
    try {
      await this.api.confirm(this.state.raterId);
      this.update({ busy: false });
      await this.advance();
    } catch (err) {
      this.update({ busy: false, error: describe(err) });
    }
  }

  select(category: number): void {
    if (this.state.phase !== 'rating' || category < 0 || category > 4) return;
    this.update({ selection: category, error: null });
  }

  /** Submit the explicit selection for the current pair. */
  async submitRating(): Promise<void> {
    const { raterId, current, selection, busy } = this.state;
    if (busy || !raterId || !current || selection === null) return;
    if (this.rated.has(current.pair_id)) return; // never edit a rated pair
    this.update({ busy: true, error: null });
    try {
      const ack = await this.api.submitRating(raterId, current.pair_id, selection);
      this.rated.add(current.pair_id);
      // progress moves only on acknowledgment
      this.update({ busy: false, progress: ack.progress, selection: null });
      await this.advance();
    } catch (err) {
      if (err instanceof ApiError && err.code === 'already_rated') {
        this.rated.add(current.pair_id);
        this.update({ busy: false, selection: null, error: err.message });
        await this.advance();
        return;
      }
      // non-blocking retry: keep the selection and the current pair
      this.update({ busy: false, error: describe(err) });
    }
  }

  async postpone(): Promise<void> {
    const { raterId, current, busy } = this.state;
    if (busy || !raterId || !current) return;
    this.update({ busy: true, error: null });
    try {
      await this.api.postpone(raterId, current.pair_id);
      this.update({ busy: false, selection: null });
      await this.advance();
    } catch (err) {
      this.update({ busy: false, error: describe(err) });
    }
  }

  private async advance(): Promise<void> {
    if (!this.state.raterId) return;
    try {
      const next = await this.api.next(this.state.raterId);
      if (next.done) {
        this.update({ phase: 'done', current: null, selection: null });
        return;
      }
      this.update({ phase: 'rating', current: next.item ?? null, selection: null });
    } catch (err) {
      if (err instanceof ApiError && err.code === 'instructions_not_confirmed') {
        await this.loadInstructions(this.state.language);
        return;
      }
      this.update({ error: describe(err) });
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  return String(err);
}
