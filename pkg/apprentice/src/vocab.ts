/** Whitespace word vocabulary with a copy-index extension.
 *
 * Ids 0..3 are reserved for PAD/BOS/EOS/UNK.  Words outside the vocabulary
 * get per-example extended ids `size + k`, where k indexes the example's
 * source OOV list, so the copy mechanism can emit them verbatim.
 */

export const PAD = 0;
export const BOS = 1;
export const EOS = 2;
export const UNK = 3;

export const SPECIALS = ["<pad>", "<bos>", "<eos>", "<unk>"];

export function tokenize(text: string): string[] {
  return text.split(/\s+/).filter((w) => w.length > 0);
}

export interface EncodedExample {
  /** source ids with OOV mapped to UNK, for the encoder embedding */
  srcIds: number[];
  /** source ids where OOV words carry extended ids, for the copy scatter */
  srcExtIds: number[];
  /** target ids (plus EOS) in the extended vocabulary */
  tgtExtIds: number[];
  /** the example's source OOV words, in first-occurrence order */
  oovs: string[];
}

export class Vocab {
  readonly words: string[];
  private readonly index = new Map<string, number>();

  constructor(words: string[]) {
    this.words = [...SPECIALS, ...words];
    this.words.forEach((w, i) => this.index.set(w, i));
  }

  static fromTexts(texts: string[]): Vocab {
    const seen = new Map<string, number>();
    for (const text of texts) {
      for (const word of tokenize(text)) {
        seen.set(word, (seen.get(word) ?? 0) + 1);
      }
    }
    const words = [...seen.keys()].sort(
      (a, b) => (seen.get(b)! - seen.get(a)!) || (a < b ? -1 : 1),
    );
    return new Vocab(words);
  }

  get size(): number {
    return this.words.length;
  }

  id(word: string): number {
    return this.index.get(word) ?? UNK;
  }

  word(id: number, oovs: string[] = []): string {
    if (id < this.size) {
      return this.words[id];
    }
    const oov = oovs[id - this.size];
    return oov ?? SPECIALS[UNK];
  }

  /** Encode a (source, target) pair with the copy extension. */
  encode(source: string, target: string): EncodedExample {
    const srcWords = tokenize(source);
    const oovs: string[] = [];
    const srcIds: number[] = [];
    const srcExtIds: number[] = [];
    for (const word of srcWords) {
      const id = this.index.get(word);
      if (id !== undefined) {
        srcIds.push(id);
        srcExtIds.push(id);
      } else {
        let k = oovs.indexOf(word);
        if (k < 0) {
          k = oovs.length;
          oovs.push(word);
        }
        srcIds.push(UNK);
        srcExtIds.push(this.size + k);
      }
    }
    const tgtExtIds = tokenize(target).map((word) => {
      const id = this.index.get(word);
      if (id !== undefined) {
        return id;
      }
      const k = oovs.indexOf(word);
      return k >= 0 ? this.size + k : UNK;
    });
    tgtExtIds.push(EOS);
    return { srcIds, srcExtIds, tgtExtIds, oovs };
  }

  /** Source-only encoding for generation. */
  encodeSource(source: string): EncodedExample {
    return this.encode(source, "");
  }

  decode(ids: number[], oovs: string[]): string {
    const words: string[] = [];
    for (const id of ids) {
      if (id === EOS || id === PAD) {
        break;
      }
      if (id === BOS) {
        continue;
      }
      words.push(this.word(id, oovs));
    }
    return words.join(" ");
  }

  toJSON(): { words: string[] } {
    return { words: this.words.slice(SPECIALS.length) };
  }

  static fromJSON(payload: { words: string[] }): Vocab {
    return new Vocab(payload.words);
  }
}
