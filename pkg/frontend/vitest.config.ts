import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    include: ["test/**/*.test.ts"],
    // the end-to-end test runs a full scripted session against a live server
    testTimeout: 120_000,
    hookTimeout: 60_000,
  },
});
