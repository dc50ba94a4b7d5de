/** Minimal glob: `*` wildcards in the basename, literal directories. */

import { readdirSync } from "node:fs";

export function expandGlob(pattern: string): string[] {
  if (!pattern.includes("*")) return [pattern];
  const slash = pattern.lastIndexOf("/");
  const dir = slash >= 0 ? pattern.slice(0, slash) : ".";
  const base = pattern.slice(slash + 1);
  if (dir.includes("*")) {
    throw new Error(`wildcards are only supported in the filename: ${pattern}`);
  }
  const regex = new RegExp(
    "^" + base.split("*").map(escapeRegex).join(".*") + "$",
  );
  let entries: string[];
  try {
    entries = readdirSync(dir);
  } catch {
    throw new Error(`cannot list directory ${dir}`);
  }
  return entries
    .filter((name) => regex.test(name))
    .sort()
    .map((name) => (slash >= 0 ? `${dir}/${name}` : name));
}

function escapeRegex(text: string): string {
  return text.replace(/[.*+?^${}()|[\]\\]/g, "\\$&");
}
