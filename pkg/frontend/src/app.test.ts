/** End-to-end tests against the real grading service.
 *
 * beforeAll builds two tiny image corpora on disk and starts the actual
 * HTTP service in a child process; the UI under test talks to it over
 * real HTTP only.
 */

import {spawn, ChildProcess} from 'node:child_process';
import {mkdtempSync, rmSync} from 'node:fs';
import {tmpdir} from 'node:os';
import {join} from 'node:path';
import {afterAll, beforeAll, beforeEach, describe, expect, it} from 'vitest';

import {TuringClient} from './api.js';
import {TuringApp} from './app.js';

const SETUP_SCRIPT = `
import csv, os, sys
import numpy as np
import uvicorn
from PIL import Image
from synthval.turing import TuringStore, create_app

root, port = sys.argv[1], int(sys.argv[2])
rng = np.random.default_rng(0)
for name, label in (("real", "real"), ("synth", "synthetic")):
    directory = os.path.join(root, name)
    os.mkdir(directory)
    rows = []
    for i in range(8):
        img = (rng.uniform(0, 1, (16, 16)) * 255).astype(np.uint8)
        fname = f"{label}_{i}.png"
        Image.fromarray(img).save(os.path.join(directory, fname))
        rows.append((fname, label))
    with open(os.path.join(directory, "manifest.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["path", "label"])
        w.writerows(rows)
store = TuringStore(log_path=os.path.join(root, "events.jsonl"))
uvicorn.run(create_app(store), host="127.0.0.1", port=port, log_level="warning")
`;

const port = 20000 + Math.floor(Math.random() * 20000);
const base = `http://127.0.0.1:${port}`;
let server: ChildProcess;
let workdir: string;

function sessionParams(n: number) {
  return {
    realManifest: join(workdir, 'real', 'manifest.csv'),
    synthManifest: join(workdir, 'synth', 'manifest.csv'),
    nReal: n,
    nSynth: n,
    seed: 0,
  };
}

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const resp = await fetch(`${base}/openapi.json`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error('service did not come up');
}

async function waitFor(what: string, predicate: () => boolean): Promise<void> {
  for (let i = 0; i < 100; i++) {
    if (predicate()) return;
    await new Promise((resolve) => setTimeout(resolve, 50));
  }
  throw new Error(`timed out waiting for ${what}`);
}

function settle(app: TuringApp, state: string): Promise<void> {
  return waitFor(`state ${state} (stuck in ${app.state})`,
                 () => app.state === state);
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), 'turing-ui-'));
  server = spawn('python3', ['-c', SETUP_SCRIPT, workdir, String(port)], {
    stdio: ['ignore', 'inherit', 'inherit'],
  });
  await waitForServer();
});

afterAll(() => {
  server?.kill();
  rmSync(workdir, {recursive: true, force: true});
});

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
  root = document.getElementById('app')!;
});

function clickButton(id: string): void {
  (root.querySelector(`#${id}`) as HTMLButtonElement).click();
}

describe('grading session end to end', () => {
  it('completes a 10-item session and renders the report', async () => {
    const app = new TuringApp(new TuringClient(base), root);
    await app.start(sessionParams(5));
    await settle(app, 'grading');

    for (let i = 0; i < 10; i++) {
      expect(app.state).toBe('grading');
      // progress indicator tracks the cursor
      expect(root.textContent).toContain(`Item ${i + 1} of 10`);
      const progress = root.querySelector('progress')!;
      expect(progress.getAttribute('value')).toBe(String(i));
      // the grader must never see ground truth
      expect(root.innerHTML).not.toContain('true_label');
      expect(root.innerHTML).not.toContain('synthetic');
      // image is served through an opaque token
      const img = root.querySelector('img.subject')!;
      expect(img.getAttribute('src')).toMatch(/\/images\/[0-9a-f]{32}$/);

      clickButton(i % 2 === 0 ? 'btn-real' : 'btn-fake');
      if (i < 9) {
        await waitFor(`item ${i + 2}`,
                      () => root.textContent!.includes(`Item ${i + 2} of 10`));
      } else {
        await settle(app, 'report');
      }
    }

    expect(app.state).toBe('report');
    expect(root.textContent).toContain('Session complete');
    // table cells sum to the session size
    const report = await new TuringClient(base).report(app.sessionId);
    expect(report.table.total).toBe(10);
    const sum = report.table.counts.flat().reduce((a, b) => a + b, 0);
    expect(sum).toBe(10);
  });

  it('supports the R and F keyboard shortcuts', async () => {
    const app = new TuringApp(new TuringClient(base), root);
    await app.start({...sessionParams(2), seed: 1});
    await settle(app, 'grading');

    for (let i = 0; i < 4; i++) {
      document.dispatchEvent(
          new KeyboardEvent('keydown', {key: i % 2 === 0 ? 'r' : 'F'}));
      if (i < 3) {
        await waitFor(`item ${i + 2}`,
                      () => root.textContent!.includes(`Item ${i + 2} of 4`));
      } else {
        await settle(app, 'report');
      }
    }
    expect(app.state).toBe('report');
    app.detach();
  });

  it('records exactly one judgment for a double click', async () => {
    const app = new TuringApp(new TuringClient(base), root);
    await app.start({...sessionParams(2), seed: 2});
    await settle(app, 'grading');

    // two clicks in the same tick: the second lands while the first is
    // still in flight and must be dropped
    clickButton('btn-real');
    clickButton('btn-real');
    await waitFor('item 2',
                  () => root.textContent!.includes('Item 2 of 4'));

    const client = new TuringClient(base);
    // judgment for index 1 must be accepted now; if the double click had
    // recorded twice the cursor would already be past it
    const ack = await client.submitJudgment(app.sessionId, 1, 'fake');
    expect(ack.cursor).toBe(2);
    app.detach();
  });

  it('shows errors from the service instead of crashing', async () => {
    const app = new TuringApp(new TuringClient(base), root);
    await app.resume('no-such-session');
    await settle(app, 'error');
    expect(root.textContent).toContain('Something went wrong');
  });

  it('blinds every HTTP response during grading', async () => {
    const client = new TuringClient(base);
    const info = await client.createSession({...sessionParams(3), seed: 3});
    for (let i = 0; i < 6; i++) {
      const next = await client.nextItem(info.session_id);
      expect(JSON.stringify(next)).not.toContain('synthetic');
      expect(JSON.stringify(next)).not.toContain('true_label');
      const ack = await client.submitJudgment(info.session_id, i, 'fake');
      expect(JSON.stringify(ack)).not.toContain('synthetic');
    }
    const report = await client.report(info.session_id);
    expect(report.table.total).toBe(6);
  });
});
