// Typed client for the rating service HTTP+JSON API.

export interface ScalePoint {
  category: number;
  label: string;
  description: string;
  word_pairs: string[][];
}

export interface InstructionPart {
  id: string;
  title: string;
  steps?: string[];
  sample_note?: string;
  sample_concept?: EntryCard;
  points?: ScalePoint[];
  optional?: boolean;
  collapsed?: boolean;
  sets?: unknown[];
}

export interface Instructions {
  language: string;
  parts: InstructionPart[];
  confirmation_required: boolean;
}

export interface EntryCard {
  terms: string[];
  definition: string;
}

export interface PairPresentation {
  pair_id: string;
  position: number;
  total: number;
  left: EntryCard;
  right: EntryCard;
}

export interface Progress {
  rated: number;
  total: number;
  postponed: number;
  confirmed: boolean;
}

export interface NextResponse {
  done: boolean;
  item?: PairPresentation;
}

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
  }
}

export class RatingApi {
  constructor(private readonly baseUrl: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        headers: { 'Content-Type': 'application/json' },
        ...init,
      });
    } catch (err) {
      throw new ApiError('network_error', `service unreachable: ${err}`, 0);
    }
    if (!response.ok) {
      let code = 'http_error';
      let message = `request failed with status ${response.status}`;
      try {
        const body = await response.json();
        if (body && typeof body.code === 'string') {
          code = body.code;
          message = body.message ?? message;
        }
      } catch {
        // non-JSON error body: keep the generic message
      }
      throw new ApiError(code, message, response.status);
    }
    return response.json() as Promise<T>;
  }

  register(code: string): Promise<{ rater_id: string; total_items: number }> {
    return this.request('/register', { method: 'POST', body: JSON.stringify({ code }) });
  }

  instructions(language: string): Promise<Instructions> {
    return this.request(`/instructions?language=${encodeURIComponent(language)}`);
  }

  confirm(raterId: string): Promise<{ confirmed: boolean }> {
    return this.request('/confirm', {
      method: 'POST',
      body: JSON.stringify({ rater_id: raterId }),
    });
  }

  next(raterId: string): Promise<NextResponse> {
    return this.request(`/next?rater_id=${encodeURIComponent(raterId)}`);
  }

  submitRating(
    raterId: string,
    pairId: string,
    category: number,
  ): Promise<{ accepted: boolean; progress: { rated: number; total: number } }> {
    return this.request('/rating', {
      method: 'POST',
      body: JSON.stringify({ rater_id: raterId, pair_id: pairId, category }),
    });
  }

  postpone(
    raterId: string,
    pairId: string,
  ): Promise<{ postponed: boolean; progress: { rated: number; total: number } }> {
    return this.request('/postpone', {
      method: 'POST',
      body: JSON.stringify({ rater_id: raterId, pair_id: pairId }),
    });
  }

  progress(raterId: string): Promise<Progress> {
    return this.request(`/progress?rater_id=${encodeURIComponent(raterId)}`);
  }
}
