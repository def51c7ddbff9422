// DOM rendering: one function per phase, no state of its own.

import { EntryCard, ScalePoint } from './api';
import { Language, SessionController, SessionState } from './state';

export function renderApp(root: HTMLElement, state: SessionState, controller: SessionController): void {
  root.innerHTML = '';
  root.append(header(state));
  if (state.error) root.append(errorBanner(state, controller));
  switch (state.phase) {
    case 'register':
      root.append(registerScreen(state, controller));
      break;
    case 'instructions':
      if (state.instructions) root.append(instructionsScreen(state, controller));
      break;
    case 'examples':
      root.append(examplesScreen(state, controller));
      break;
    case 'rating':
      if (state.current) root.append(ratingScreen(state, controller));
      break;
    case 'done':
      root.append(doneScreen(state));
      break;
  }
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function header(state: SessionState): HTMLElement {
  const bar = el('header', 'top-bar');
  bar.append(el('span', 'title', 'Concept similarity rating'));
  if (state.raterId && state.progress.total > 0) {
    const counter = el('span', 'progress-counter',
      `${state.progress.rated} / ${state.progress.total}`);
    counter.setAttribute('data-testid', 'progress');
    bar.append(counter);
  }
  return bar;
}

function errorBanner(state: SessionState, controller: SessionController): HTMLElement {
  const banner = el('div', 'error-banner');
  banner.setAttribute('data-testid', 'error');
  banner.append(el('span', undefined, state.error ?? ''));
  // instruction fetch failures get an explicit retry control
  if (state.phase === 'instructions' && !state.instructions) {
    const retry = el('button', 'retry', 'Retry');
    retry.addEventListener('click', () => void controller.loadInstructions(state.language));
    banner.append(retry);
  }
  return banner;
}

function registerScreen(state: SessionState, controller: SessionController): HTMLElement {
  const screen = el('section', 'screen register-screen');
  screen.append(el('h1', undefined, 'Welcome'));
  screen.append(el('p', undefined,
    'Enter the invitation code you received to start a rating session. '
    + 'Participation is anonymous.'));

  const languagePicker = el('select', 'language-picker') as HTMLSelectElement;
  for (const lang of ['en', 'de'] as Language[]) {
    const option = el('option', undefined, lang === 'en' ? 'English' : 'Deutsch');
    option.setAttribute('value', lang);
    languagePicker.append(option);
  }
  languagePicker.value = state.language;
  screen.append(languagePicker);

  const input = el('input') as HTMLInputElement;
  input.placeholder = 'invitation code';
  input.setAttribute('data-testid', 'code-input');
  const button = el('button', 'primary', 'Start');
  button.setAttribute('data-testid', 'register');
  button.addEventListener('click', () => {
    controller.setLanguage(languagePicker.value as Language);
    void controller.register(input.value.trim());
  });
  screen.append(input, button);
  return screen;
}

function instructionsScreen(state: SessionState, controller: SessionController): HTMLElement {
  const screen = el('section', 'screen instructions-screen');
  const instructions = state.instructions!;
  const task = instructions.parts.find((part) => part.id === 'task');
  const scale = instructions.parts.find((part) => part.id === 'scale');
  const examples = instructions.parts.find((part) => part.id === 'domain_examples');

  if (task) {
    screen.append(el('h1', undefined, task.title));
    const steps = el('ol', 'task-steps');
    for (const step of task.steps ?? []) steps.append(el('li', undefined, step));
    screen.append(steps);
    if (task.sample_concept) {
      screen.append(el('p', 'sample-note', task.sample_note ?? ''));
      screen.append(conceptCard(task.sample_concept));
    }
  }

  if (scale?.points) {
    screen.append(el('h2', undefined, scale.title));
    screen.append(scaleTable(scale.points));
  }

  if (examples && (examples.sets?.length ?? 0) > 0) {
    // optional domain examples stay collapsed until asked for
    const toggle = el('button', 'link', examples.title);
    toggle.setAttribute('data-testid', 'show-examples');
    toggle.addEventListener('click', () => controller.showExamples());
    screen.append(toggle);
  }

  const confirm = el('button', 'primary', 'I have read and understood the instructions');
  confirm.setAttribute('data-testid', 'confirm');
  confirm.addEventListener('click', () => void controller.confirmInstructions());
  screen.append(confirm);
  return screen;
}

function examplesScreen(state: SessionState, controller: SessionController): HTMLElement {
  const screen = el('section', 'screen examples-screen');
  const examples = state.instructions?.parts.find((part) => part.id === 'domain_examples');
  screen.append(el('h1', undefined, examples?.title ?? ''));
  for (const set of (examples?.sets ?? []) as Array<Record<string, unknown>>) {
    const block = el('div', 'example-set');
    block.append(el('pre', undefined, JSON.stringify(set, null, 2)));
    screen.append(block);
  }
  const back = el('button', 'primary', 'Back to instructions');
  back.setAttribute('data-testid', 'back');
  back.addEventListener('click', () => controller.backToInstructions());
  screen.append(back);
  return screen;
}

function scaleTable(points: ScalePoint[]): HTMLElement {
  const table = el('table', 'scale-table');
  table.setAttribute('data-testid', 'scale');
  for (const point of points) {
    const row = table.insertRow();
    row.insertCell().textContent = String(point.category);
    const labelCell = row.insertCell();
    labelCell.append(el('strong', 'scale-label', point.label));
    const description = row.insertCell();
    description.className = 'scale-description';
    description.append(el('div', undefined, point.description));
    const pairs = (point.word_pairs ?? [])
      .map((words) => words.join(' – ')).join(', ');
    if (pairs) description.append(el('div', 'word-pairs', pairs));
  }
  return table;
}

function conceptCard(entry: EntryCard): HTMLElement {
  const card = el('div', 'concept-card');
  card.append(el('div', 'terms', entry.terms.join(', ')));
  card.append(el('div', 'definition', entry.definition));
  return card;
}

function ratingScreen(state: SessionState, controller: SessionController): HTMLElement {
  const screen = el('section', 'screen rating-screen');
  const pair = state.current!;

  const cards = el('div', 'pair-cards');
  cards.setAttribute('data-testid', 'pair');
  cards.setAttribute('data-pair-id', pair.pair_id);
  cards.append(conceptCard(pair.left), conceptCard(pair.right));
  screen.append(cards);

  // the scale, with full descriptions, stays visible while rating
  const scale = state.instructions?.parts.find((part) => part.id === 'scale');
  const selector = el('div', 'rating-selector');
  for (const point of scale?.points ?? []) {
    const option = el('label', 'rating-option');
    const radio = el('input') as HTMLInputElement;
    radio.type = 'radio';
    radio.name = 'rating';
    radio.value = String(point.category);
    radio.checked = state.selection === point.category;
    radio.setAttribute('data-testid', `rate-${point.category}`);
    radio.addEventListener('change', () => controller.select(point.category));
    option.append(radio, el('strong', undefined, `${point.category} ${point.label}`),
      el('small', 'scale-description', point.description));
    selector.append(option);
  }
  screen.append(selector);

  const controls = el('div', 'controls');
  const submit = el('button', 'primary', 'Submit rating') as HTMLButtonElement;
  submit.setAttribute('data-testid', 'submit');
  submit.disabled = state.selection === null || state.busy;
  submit.addEventListener('click', () => void controller.submitRating());
  const postpone = el('button', 'secondary', 'Postpone') as HTMLButtonElement;
  postpone.setAttribute('data-testid', 'postpone');
  postpone.disabled = state.busy;
  postpone.addEventListener('click', () => void controller.postpone());
  controls.append(submit, postpone);
  screen.append(controls);
  return screen;
}

function doneScreen(state: SessionState): HTMLElement {
  const screen = el('section', 'screen done-screen');
  screen.setAttribute('data-testid', 'done');
  screen.append(el('h1', undefined, 'All pairs rated'));
  screen.append(el('p', undefined,
    `Thank you. You rated ${state.progress.rated} of ${state.progress.total} pairs.`));
  return screen;
}
