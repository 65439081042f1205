/** Just enough parsing of the game source to build switch controls.
 *
 * The full language lives server-side; the client only needs the switch
 * declarations (bid, owner, aliases) and the initial switch positions
 * from init(does(...)) clauses.
 */

export interface SwitchDecl {
  bid: number;
  owner: string;
  aliases: string[];
}

function stripComments(source: string): string {
  return source.replace(/\/\/[^\n]*/g, "");
}

function parseAlias(raw: string): string {
  const t = raw.trim();
  if (t.startsWith("'") && t.endsWith("'")) return t.slice(1, -1);
  return t;
}

export function parseSwitches(source: string): SwitchDecl[] {
  const text = stripComments(source);
  const out: SwitchDecl[] = [];
  const re = /switch\(\s*(\d+)\s*,\s*('[^']*'|[a-z]\w*)\s*,\s*\[([\s\S]*?)\]\s*\)\s*\./g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(text)) !== null) {
    out.push({
      bid: Number(m[1]),
      owner: parseAlias(m[2]),
      aliases: m[3].split(",").map(parseAlias).filter((a) => a.length > 0),
    });
  }
  return out;
}

/** Initial switch positions: bid -> alias. */
export function parseInitialDoes(source: string): Map<number, string> {
  const text = stripComments(source);
  const out = new Map<number, string>();
  const re = /init\(\s*does\(\s*(\d+)\s*,\s*('[^']*'|[a-z0-9]\w*)\s*\)\s*\)\s*\./g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(text)) !== null) {
    out.set(Number(m[1]), parseAlias(m[2]));
  }
  return out;
}
