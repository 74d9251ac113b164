import {defineConfig} from 'vitest/config';

export default defineConfig({
  test: {
    environment: 'happy-dom',
    testTimeout: 60000,
    hookTimeout: 60000,
    include: ['src/**/*.test.ts'],
  },
});
