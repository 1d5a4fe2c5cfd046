// The click-query rule, mirrored from the server: last sentence of the stem
// (boundaries are . ? ! followed by whitespace or end of string, terminal
// punctuation kept), one space, full choice text.

export function lastSentence(text: string): string {
  const s = text.trim();
  let start = 0;
  for (let i = 0; i < s.length; i++) {
    const ch = s[i];
    if (ch === "." || ch === "?" || ch === "!") {
      const next = i + 1;
      if (next === s.length) {
        break; // terminal punctuation ends the last sentence, not a new one
      }
      if (/\s/.test(s[next])) {
        start = next;
      }
    }
  }
  return s.slice(start).trim();
}

export function defaultQuery(stem: string, choiceText: string): string {
  return `${lastSentence(stem)} ${choiceText}`;
}
