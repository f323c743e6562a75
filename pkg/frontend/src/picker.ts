/**
 * Enrollment picker state: the user taps full-quality images in the order of
 * their mnemonic story. Selections carry 1-based badges; re-tapping a
 * selected image removes it and renumbers the rest; submission unlocks at
 * exactly the required count.
 */
export class StoryPicker {
  private selection: string[] = [];

  constructor(readonly required: number) {
    if (required < 1) throw new Error("picker needs a positive password length");
  }

  toggle(id: string): void {
    const at = this.selection.indexOf(id);
    if (at >= 0) {
      this.selection.splice(at, 1);
    } else if (this.selection.length < this.required) {
      this.selection.push(id);
    }
  }

  /** 1-based story position of an image, or null when unselected. */
  badge(id: string): number | null {
    const at = this.selection.indexOf(id);
    return at >= 0 ? at + 1 : null;
  }

  get selected(): readonly string[] {
    return this.selection;
  }

  get canSubmit(): boolean {
    return this.selection.length === this.required;
  }

  reset(): void {
    this.selection = [];
  }
}
