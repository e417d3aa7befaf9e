// Boots the real visualization service in replay mode for the UI tests.
// Every provider exchange comes from the committed cassette, so the suite
// runs offline and deterministically.

import { spawn, type ChildProcess } from "node:child_process";
import net from "node:net";
import path from "node:path";
import { fileURLToPath } from "node:url";

declare module "vitest" {
  export interface ProvidedContext {
    baseUrl: string;
  }
}

const HERE = path.dirname(fileURLToPath(import.meta.url));
const CASSETTE = path.join(HERE, "fixtures", "ui.cassette.json");

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = net.createServer();
    server.once("error", reject);
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        server.close(() => reject(new Error("no port assigned")));
      }
    });
  });
}

async function waitReady(baseUrl: string, child: ChildProcess): Promise<void> {
  const deadline = Date.now() + 30_000;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early with code ${child.exitCode}`);
    }
    try {
      const res = await fetch(`${baseUrl}/styles`);
      if (res.ok) return;
    } catch (err) {
      lastError = err;
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error(`service never became ready: ${String(lastError)}`);
}

export default async function setup({
  provide,
}: {
  provide: (key: "baseUrl", value: string) => void;
}) {
  const port = await freePort();
  const baseUrl = `http://127.0.0.1:${port}`;
  const child = spawn(
    "vizsmith",
    ["serve", "--port", String(port), "--provider", "replay", "--cassette", CASSETTE],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  const logs: string[] = [];
  child.stdout?.on("data", (chunk: Buffer) => logs.push(chunk.toString()));
  child.stderr?.on("data", (chunk: Buffer) => logs.push(chunk.toString()));
  try {
    await waitReady(baseUrl, child);
  } catch (err) {
    child.kill("SIGKILL");
    throw new Error(`${String(err)}\nservice output:\n${logs.join("")}`);
  }
  provide("baseUrl", baseUrl);
  return async () => {
    child.kill("SIGTERM");
    await new Promise<void>((resolve) => {
      const timer = setTimeout(() => {
        child.kill("SIGKILL");
        resolve();
      }, 5_000);
      child.once("exit", () => {
        clearTimeout(timer);
        resolve();
      });
    });
  };
}
