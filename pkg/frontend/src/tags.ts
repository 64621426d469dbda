// The only tags the editor can ever produce: O plus B-/I- over the served
// entity types. Free-text tags are impossible by construction.

export function tagOptions(entityTypes: string[]): string[] {
  const options = ["O"];
  for (const entityType of entityTypes) {
    options.push(`B-${entityType}`, `I-${entityType}`);
  }
  return options;
}

export function cycleTag(current: string, options: string[], step: 1 | -1): string {
  const index = options.indexOf(current);
  if (index < 0 || options.length === 0) return options[0] ?? current;
  return options[(index + step + options.length) % options.length] as string;
}

/** Token index named by a server validation message ("tag 3: ..."), if any. */
export function offendingTokenIndex(message: string): number | null {
  const match = /^tag (\d+):/.exec(message);
  return match ? Number(match[1]) : null;
}
