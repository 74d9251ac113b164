/** Browser entry point. Session settings come from the query string:
 *
 *   index.html?api=http://127.0.0.1:8000&real=/data/real/manifest.csv
 *             &synth=/data/synth/manifest.csv&n=100&seed=0
 *
 * or attach to an existing session with ?api=...&session=<id>.
 */

import {TuringClient} from './api.js';
import {TuringApp} from './app.js';

const params = new URLSearchParams(window.location.search);
const api = params.get('api') ?? 'http://127.0.0.1:8000';
const root = document.getElementById('app')!;
const app = new TuringApp(new TuringClient(api), root);

const existing = params.get('session');
if (existing) {
  void app.resume(existing);
} else if (params.get('real') && params.get('synth')) {
  const n = Number(params.get('n') ?? '100');
  void app.start({
    realManifest: params.get('real')!,
    synthManifest: params.get('synth')!,
    nReal: n,
    nSynth: n,
    seed: Number(params.get('seed') ?? '0'),
  });
} else {
  root.innerHTML = '<p class="status">Missing query parameters: pass ' +
      '<code>?real=...&amp;synth=...</code> to start a session or ' +
      '<code>?session=...</code> to resume one.</p>';
}
