/** Typed client for the grading service HTTP API. */

export interface SessionInfo {
  session_id: string;
  total: number;
  cursor: number;
  status: string;
}

export interface NextItem {
  session_id: string;
  status: 'active' | 'complete';
  index: number;
  total: number;
  image_token?: string;
}

export interface JudgmentAck {
  session_id: string;
  cursor: number;
  status: string;
  duplicate: boolean;
}

export interface Report {
  table: {
    row_labels: string[];
    col_labels: string[];
    counts: number[][];
    total: number;
  };
  chi_square: {statistic: number; p_value: number} | null;
}

export interface SessionParams {
  realManifest: string;
  synthManifest: string;
  nReal: number;
  nSynth: number;
  seed: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
  }
}

export class TuringClient {
  constructor(readonly base: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.base + path, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        detail = (await resp.json()).detail ?? detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return resp.json() as Promise<T>;
  }

  createSession(params: SessionParams): Promise<SessionInfo> {
    return this.request('/sessions', {
      method: 'POST',
      headers: {'Content-Type': 'application/json'},
      body: JSON.stringify({
        real_manifest: params.realManifest,
        synth_manifest: params.synthManifest,
        n_real: params.nReal,
        n_synth: params.nSynth,
        seed: params.seed,
      }),
    });
  }

  nextItem(sessionId: string): Promise<NextItem> {
    return this.request(`/sessions/${sessionId}/next`);
  }

  submitJudgment(sessionId: string, index: number, label: 'real' | 'fake'):
      Promise<JudgmentAck> {
    return this.request(`/sessions/${sessionId}/judgments`, {
      method: 'POST',
      headers: {'Content-Type': 'application/json'},
      body: JSON.stringify({index, label}),
    });
  }

  report(sessionId: string): Promise<Report> {
    return this.request(`/sessions/${sessionId}/report`);
  }

  imageUrl(token: string): string {
    return `${this.base}/images/${token}`;
  }
}
