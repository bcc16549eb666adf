/**
 * Holds the latest accepted state event and enforces revision monotonicity.
 *
 * Events can arrive from two paths at once (the websocket stream and the
 * body of a command response), so duplicates and reordering are normal.
 * The rule is simple: an event is applied only if its revision is strictly
 * greater than the one already held. Applied events reach subscribers
 * exactly once each.
 */

import type { StateEvent } from "./wire.js";

export type Listener = (event: StateEvent) => void;

export class SessionStore {
  private event: StateEvent | null = null;
  private listeners = new Set<Listener>();
  private appliedCount = 0;
  private droppedCount = 0;

  get current(): StateEvent | null {
    return this.event;
  }

  get revision(): number {
    return this.event?.revision ?? 0;
  }

  get applied(): number {
    return this.appliedCount;
  }

  get dropped(): number {
    return this.droppedCount;
  }

  /** Apply an incoming event; returns true when it advanced the state. */
  apply(event: StateEvent): boolean {
    if (this.event !== null) {
      if (event.session_id !== this.event.session_id) {
        this.droppedCount += 1;
        return false;
      }
      if (event.revision <= this.event.revision) {
        this.droppedCount += 1;
        return false;
      }
    }
    this.event = event;
    this.appliedCount += 1;
    for (const listener of this.listeners) {
      listener(event);
    }
    return true;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.add(listener);
    return () => {
      this.listeners.delete(listener);
    };
  }

  /** Forget the session (used when switching models). */
  clear(): void {
    this.event = null;
  }
}
