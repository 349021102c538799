/** UI state that outlives a single request.
 *
 * The selected current node round-trips: whatever is highlighted in the
 * inspector is exactly what the next query sends as current_node, and
 * clearing the selection makes the next request omit the field (the server
 * then defaults to the home node).
 */

export class CurrentNodeSelection {
  private selected: number | null = null;
  private listeners: Array<(id: number | null) => void> = [];

  get(): number | null {
    return this.selected;
  }

  select(id: number): void {
    this.selected = id;
    this.emit();
  }

  /** Clicking the selected node again (or the clear button) deselects. */
  toggle(id: number): void {
    this.selected = this.selected === id ? null : id;
    this.emit();
  }

  clear(): void {
    this.selected = null;
    this.emit();
  }

  /** Value for the request body; undefined omits the field entirely. */
  requestValue(): number | undefined {
    return this.selected === null ? undefined : this.selected;
  }

  onChange(fn: (id: number | null) => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) fn(this.selected);
  }
}
