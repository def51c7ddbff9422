// Wire the controller to the page. The service base URL comes from the
// ?service= query parameter and defaults to the page's own origin.

import { RatingApi } from './api';
import { SessionController, browserTokenStorage } from './state';
import { renderApp } from './view';

function serviceBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('service');
  if (fromQuery) return fromQuery.replace(/\/$/, '');
  return window.location.origin;
}

function main(): void {
  const root = document.getElementById('app');
  if (!root) return;
  const api = new RatingApi(serviceBaseUrl());
  const controller = new SessionController(api, browserTokenStorage(window.localStorage));
  controller.subscribe((state) => renderApp(root, state, controller));
  renderApp(root, controller.snapshot, controller);
  void controller.start();
}

main();
