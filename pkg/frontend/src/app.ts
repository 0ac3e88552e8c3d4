import { TutorApi } from "./api";
import { UiSessionModel } from "./model";
import { render } from "./view";

/** Wire the model to a root element; re-renders on every state change. */
export function startApp(root: HTMLElement, baseUrl: string): UiSessionModel {
  const model = new UiSessionModel(new TutorApi(baseUrl));
  model.subscribe(() => render(root, model));
  render(root, model);
  return model;
}
