import { defineConfig } from "vitest/config";

// Integration run against a live game service; spawns the Python server
// itself, so it needs the package installed (pip install -e ..).
export default defineConfig({
  test: {
    include: ["tests/service.e2e.ts"],
    environment: "node",
    testTimeout: 90_000,
    hookTimeout: 30_000,
  },
});
