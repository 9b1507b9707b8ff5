import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // Each test shells out to the Python CLI; keep runs serial and generous.
    fileParallelism: false,
    testTimeout: 120_000,
  },
});
