/** Grading UI: a three-state machine (loading, grading, report).
 *
 * The grader sees one blinded image at a time and answers Real or Fake,
 * by button or by the R / F keys. Only one judgment is ever in flight;
 * extra clicks while a request is pending are dropped, so a double click
 * records exactly one judgment.
 */

import {NextItem, Report, SessionParams, TuringClient} from './api.js';

export type AppState = 'loading' | 'grading' | 'report' | 'error';

export class TuringApp {
  state: AppState = 'loading';
  sessionId = '';
  private current: NextItem | null = null;
  private reportData: Report | null = null;
  private errorMessage = '';
  private submitting = false;
  private keyHandler: ((ev: KeyboardEvent) => void) | null = null;

  constructor(
      private readonly client: TuringClient,
      private readonly root: HTMLElement,
      private readonly doc: Document = document,
  ) {}

  async start(params: SessionParams): Promise<void> {
    this.setState('loading');
    try {
      const info = await this.client.createSession(params);
      await this.resume(info.session_id);
    } catch (err) {
      this.fail(err);
    }
  }

  /** Attach to an existing session and show its current item. */
  async resume(sessionId: string): Promise<void> {
    this.sessionId = sessionId;
    this.setState('loading');
    try {
      await this.advance();
    } catch (err) {
      this.fail(err);
    }
  }

  async judge(label: 'real' | 'fake'): Promise<void> {
    if (this.state !== 'grading' || this.submitting || !this.current) {
      return;
    }
    this.submitting = true;
    this.render();
    try {
      await this.client.submitJudgment(this.sessionId, this.current.index, label);
      await this.advance();
    } catch (err) {
      this.fail(err);
    } finally {
      this.submitting = false;
      this.render();
    }
  }

  detach(): void {
    if (this.keyHandler) {
      this.doc.removeEventListener('keydown', this.keyHandler);
      this.keyHandler = null;
    }
  }

  private async advance(): Promise<void> {
    const item = await this.client.nextItem(this.sessionId);
    if (item.status === 'complete') {
      this.reportData = await this.client.report(this.sessionId);
      this.current = null;
      this.setState('report');
    } else {
      this.current = item;
      this.setState('grading');
    }
  }

  private fail(err: unknown): void {
    this.errorMessage = err instanceof Error ? err.message : String(err);
    this.setState('error');
  }

  private setState(state: AppState): void {
    this.state = state;
    if (state === 'grading' && !this.keyHandler) {
      this.keyHandler = (ev: KeyboardEvent) => {
        const key = ev.key.toLowerCase();
        if (key === 'r') void this.judge('real');
        if (key === 'f') void this.judge('fake');
      };
      this.doc.addEventListener('keydown', this.keyHandler);
    }
    if (state !== 'grading') {
      this.detach();
    }
    this.render();
  }

  private render(): void {
    switch (this.state) {
      case 'loading':
        this.root.innerHTML = '<p class="status">Loading…</p>';
        break;
      case 'grading':
        this.renderGrading();
        break;
      case 'report':
        this.renderReport();
        break;
      case 'error':
        this.root.innerHTML = '';
        const p = this.doc.createElement('p');
        p.className = 'status error';
        p.textContent = `Something went wrong: ${this.errorMessage}`;
        this.root.appendChild(p);
        break;
    }
  }

  private renderGrading(): void {
    const item = this.current!;
    const done = item.index;
    this.root.innerHTML = `
      <div class="grading">
        <p class="progress-label">Item ${done + 1} of ${item.total}</p>
        <progress max="${item.total}" value="${done}"></progress>
        <img class="subject" alt="image under review"
             src="${this.client.imageUrl(item.image_token!)}">
        <div class="choices">
          <button id="btn-real" ${this.submitting ? 'disabled' : ''}>
            Real <kbd>R</kbd></button>
          <button id="btn-fake" ${this.submitting ? 'disabled' : ''}>
            Fake <kbd>F</kbd></button>
        </div>
      </div>`;
    this.button('btn-real').addEventListener('click', () => void this.judge('real'));
    this.button('btn-fake').addEventListener('click', () => void this.judge('fake'));
  }

  private renderReport(): void {
    const report = this.reportData!;
    const [row0, row1] = report.table.counts;
    const correct = row0[0] + row1[0];
    const accuracy = ((100 * correct) / report.table.total).toFixed(1);
    const chi = report.chi_square;
    const rows = report.table.row_labels
                     .map((label, i) => `
        <tr><th>${label}</th>
            <td>${report.table.counts[i][0]}</td>
            <td>${report.table.counts[i][1]}</td></tr>`)
                     .join('');
    this.root.innerHTML = `
      <div class="report">
        <h2>Session complete</h2>
        <p>${correct} of ${report.table.total} graded correctly (${accuracy}%).</p>
        <table>
          <tr><th></th><th>${report.table.col_labels[0]}</th>
              <th>${report.table.col_labels[1]}</th></tr>
          ${rows}
        </table>
        <p class="chi">${
        chi === null ?
            'Independence test undefined for this table.' :
            `&chi;&sup2; = ${chi.statistic.toFixed(2)}, p = ${
                chi.p_value.toExponential(2)}`}</p>
      </div>`;
  }

  private button(id: string): HTMLButtonElement {
    return this.root.querySelector(`#${id}`) as HTMLButtonElement;
  }
}
